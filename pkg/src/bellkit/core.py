"""Inequalities, behaviors and strategies for bipartite Bell scenarios.

Outcome convention: binary outcomes are +1/-1 in correlation form and 0/1
in probability form, with +1 <-> 0 and -1 <-> 1 (``sign(i) = 1 - 2*i``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Any, NamedTuple, Sequence

import numpy as np

NORM_TOL = 1e-9
CLAMP_TOL = 1e-12


class BellError(ValueError):
    """Invalid input to a bellkit operation."""


class LimitExceeded(BellError):
    """The requested enumeration is larger than the configured cap."""


def outcome_sign(index: int) -> int:
    return 1 - 2 * index


def to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not value.is_integer():
            raise BellError(f"non-integer float coefficient {value!r}; use a 'p/q' string")
        return Fraction(int(value))
    return Fraction(value)


def _fraction_repr(q: Fraction) -> int | str:
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def integer_scaled(values: np.ndarray) -> tuple[np.ndarray, int]:
    """Scale an array of Fractions to integers by the lcm of denominators.

    Returns ``(ints, scale)`` with ``values == ints / scale``. The integer
    array is int64 when it safely fits, otherwise an object array of
    Python ints.
    """
    flat = [to_fraction(v) for v in np.asarray(values, dtype=object).ravel()]
    scale = 1
    for q in flat:
        scale = lcm(scale, q.denominator)
    ints = [int(q * scale) for q in flat]
    biggest = max((abs(v) for v in ints), default=0)
    # headroom for sums over up to 2**20 terms
    dtype = np.int64 if biggest * len(ints) < 2**40 else object
    return np.array(ints, dtype=dtype).reshape(np.shape(values)), scale


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CorrelationInequality:
    """Full-correlation inequality ``sum_xy M[x][y] E(x,y) <= bound``.

    ``coeffs`` is stored as printed. When ``rows_are_bob`` is set the
    printed rows index Bob's inputs; ``matrix`` always returns the
    Alice-rows orientation used by every computation.
    """

    name: str
    coeffs: tuple[tuple[Fraction, ...], ...]
    bound: Fraction | None = None
    rows_are_bob: bool = False
    bound_conjectured: bool = False

    def __post_init__(self):
        rows = tuple(tuple(to_fraction(c) for c in row) for row in self.coeffs)
        if not rows or not rows[0]:
            raise BellError("coefficient matrix must be at least 1x1")
        if any(len(r) != len(rows[0]) for r in rows):
            raise BellError("coefficient matrix is ragged")
        object.__setattr__(self, "coeffs", rows)
        if self.bound is not None:
            object.__setattr__(self, "bound", to_fraction(self.bound))

    @property
    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        if self.rows_are_bob:
            return tuple(zip(*self.coeffs))
        return self.coeffs

    @property
    def m_a(self) -> int:
        return len(self.matrix)

    @property
    def m_b(self) -> int:
        return len(self.matrix[0])

    def as_array(self) -> np.ndarray:
        return np.array([[float(c) for c in row] for row in self.matrix])

    def with_bound(self, bound, conjectured: bool = False) -> CorrelationInequality:
        return CorrelationInequality(self.name, self.coeffs, to_fraction(bound),
                                     self.rows_are_bob, conjectured)

    def scaled(self, factor) -> CorrelationInequality:
        f = to_fraction(factor)
        bound = None if self.bound is None else self.bound * f
        return CorrelationInequality(self.name, tuple(tuple(c * f for c in r) for r in self.coeffs),
                                     bound, self.rows_are_bob, self.bound_conjectured)


@dataclass(frozen=True, eq=False)
class ProbabilityInequality:
    """Inequality ``sum C[a,b,x,y] p(a,b|x,y) <= bound`` with a dense tensor."""

    name: str
    coeffs: np.ndarray  # object array of Fraction, shape (k_a, k_b, n_a, n_b)
    bound: Fraction | None = None

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=object)
        if arr.ndim != 4 or 0 in arr.shape:
            raise BellError(f"coefficient tensor must be 4-d and non-empty, got shape {arr.shape}")
        arr = np.vectorize(to_fraction, otypes=[object])(arr)
        object.__setattr__(self, "coeffs", _readonly(arr))
        if self.bound is not None:
            object.__setattr__(self, "bound", to_fraction(self.bound))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.coeffs.shape

    @property
    def k_a(self) -> int:
        return self.shape[0]

    @property
    def k_b(self) -> int:
        return self.shape[1]

    @property
    def n_a(self) -> int:
        return self.shape[2]

    @property
    def n_b(self) -> int:
        return self.shape[3]

    def as_array(self) -> np.ndarray:
        return self.coeffs.astype(float)

    def with_bound(self, bound) -> ProbabilityInequality:
        return ProbabilityInequality(self.name, self.coeffs, to_fraction(bound))


@dataclass(frozen=True, eq=False)
class Behavior:
    """Conditional distribution ``p[a, b, x, y] = p(a,b|x,y)``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 4:
            raise BellError(f"behavior tensor must be 4-d, got shape {p.shape}")
        if p.min() < -CLAMP_TOL:
            raise BellError(f"negative probability {p.min():.3e}")
        p = np.clip(p, 0.0, None)
        sums = p.sum(axis=(0, 1))
        if np.max(np.abs(sums - 1.0)) > NORM_TOL:
            raise BellError(f"behavior not normalized (max deviation {np.max(np.abs(sums - 1)):.3e})")
        object.__setattr__(self, "p", _readonly(p))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.p.shape

    @classmethod
    def uniform(cls, k_a: int, k_b: int, n_a: int, n_b: int) -> Behavior:
        return cls(np.full((k_a, k_b, n_a, n_b), 1.0 / (k_a * k_b)))


@dataclass(frozen=True)
class DeterministicStrategy:
    """Local deterministic response functions, one outcome index per input."""

    alice: tuple[int, ...]
    bob: tuple[int, ...]

    def to_behavior(self, k_a: int, k_b: int) -> Behavior:
        if any(not 0 <= a < k_a for a in self.alice) or any(not 0 <= b < k_b for b in self.bob):
            raise BellError("deterministic outcome outside the declared range")
        p = np.zeros((k_a, k_b, len(self.alice), len(self.bob)))
        for x, a in enumerate(self.alice):
            for y, b in enumerate(self.bob):
                p[a, b, x, y] = 1.0
        return Behavior(p)

    @classmethod
    def from_signs(cls, alice: Sequence[int], bob: Sequence[int]) -> DeterministicStrategy:
        return cls(tuple((1 - s) // 2 for s in alice), tuple((1 - s) // 2 for s in bob))


@dataclass(frozen=True, eq=False)
class CorrelatorTable:
    """Correlators ``E[x, y]`` with marginals ``A[x]`` and ``B[y]``."""

    E: np.ndarray
    A: np.ndarray = field(default=None)
    B: np.ndarray = field(default=None)

    def __post_init__(self):
        E = np.array(self.E, dtype=float)
        if E.ndim != 2:
            raise BellError("E must be a matrix")
        A = np.zeros(E.shape[0]) if self.A is None else np.array(self.A, dtype=float)
        B = np.zeros(E.shape[1]) if self.B is None else np.array(self.B, dtype=float)
        if A.shape != (E.shape[0],) or B.shape != (E.shape[1],):
            raise BellError("marginal lengths do not match E")
        Ax, By = A[:, None], B[None, :]
        worst = min((1 + sa * Ax + sb * By + sa * sb * E).min() for sa in (1, -1) for sb in (1, -1))
        if worst < -NORM_TOL:
            raise BellError(f"correlators are not realizable by any behavior (margin {worst:.3e})")
        object.__setattr__(self, "E", _readonly(E))
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "B", _readonly(B))


def evaluate_correlation(ineq: CorrelationInequality, table: CorrelatorTable) -> float:
    M = ineq.as_array()
    if table.E.shape != M.shape:
        raise BellError(f"correlator table {table.E.shape} does not match inequality {M.shape}")
    return float(np.sum(M * table.E))


def evaluate_probability(ineq: ProbabilityInequality, behavior: Behavior) -> float:
    if behavior.shape != ineq.shape:
        raise BellError(f"behavior shape {behavior.shape} does not match inequality {ineq.shape}")
    return float(np.sum(ineq.as_array() * behavior.p))


def correlators_from_behavior(behavior: Behavior) -> CorrelatorTable:
    k_a, k_b, _, _ = behavior.shape
    if (k_a, k_b) != (2, 2):
        raise BellError("correlators need binary outcomes on both sides")
    p = behavior.p
    s = np.array([1.0, -1.0])
    E = np.einsum("a,b,abxy->xy", s, s, p)
    A = np.einsum("a,abxy->x", s, p[:, :, :, :1])
    B = np.einsum("b,abxy->y", s, p[:, :, :1, :])
    return CorrelatorTable(E, A, B)


def behavior_from_correlators(table: CorrelatorTable) -> Behavior:
    """Inverse map ``p(a,b|x,y) = (1 + a A_x + b B_y + a b E_xy) / 4``."""
    s = np.array([1.0, -1.0])
    p = (1 + s[:, None, None, None] * table.A[None, None, :, None]
         + s[None, :, None, None] * table.B[None, None, None, :]
         + s[:, None, None, None] * s[None, :, None, None] * table.E[None, None, :, :]) / 4
    if p.min() < -NORM_TOL:
        raise BellError(f"correlators give negative probability {p.min():.3e}")
    return Behavior(np.clip(p, 0.0, None))


class SignalingReport(NamedTuple):
    passes: bool
    max_deviation: float


def nonsignaling_check(behavior: Behavior, tol: float = 1e-9) -> SignalingReport:
    """Largest spread of a one-party marginal across the other party's inputs."""
    p = behavior.p
    alice = p.sum(axis=1)  # (a, x, y)
    bob = p.sum(axis=0)  # (b, x, y)
    dev_a = np.ptp(alice, axis=2).max()
    dev_b = np.ptp(bob, axis=1).max()
    dev = float(max(dev_a, dev_b))
    return SignalingReport(dev <= tol, dev)


def correlation_to_probability(ineq: CorrelationInequality) -> ProbabilityInequality:
    """Embed ``M_xy E_xy`` as ``C[a,b,x,y] = M_xy * sign(a) * sign(b)``; bound unchanged."""
    m_a, m_b = ineq.m_a, ineq.m_b
    C = np.empty((2, 2, m_a, m_b), dtype=object)
    for a in range(2):
        for b in range(2):
            s = outcome_sign(a) * outcome_sign(b)
            for x, row in enumerate(ineq.matrix):
                for y, c in enumerate(row):
                    C[a, b, x, y] = c * s
    return ProbabilityInequality(ineq.name, C, ineq.bound)


def pr_box() -> Behavior:
    """PR box: ``p(a,b|x,y) = 1/2`` iff ``a xor b == x*y``."""
    p = np.zeros((2, 2, 2, 2))
    for a, b, x, y in np.ndindex(2, 2, 2, 2):
        if a ^ b == x * y:
            p[a, b, x, y] = 0.5
    return Behavior(p)


# --- JSON file format -------------------------------------------------------

def inequality_to_dict(ineq: CorrelationInequality | ProbabilityInequality) -> dict:
    if isinstance(ineq, CorrelationInequality):
        doc = {"name": ineq.name, "form": "correlation", "mA": ineq.m_a, "mB": ineq.m_b,
               "kA": 2, "kB": 2,
               "coefficients": [[_fraction_repr(c) for c in row] for row in ineq.matrix]}
    else:
        doc = {"name": ineq.name, "form": "probability", "mA": ineq.n_a, "mB": ineq.n_b,
               "kA": ineq.k_a, "kB": ineq.k_b,
               "coefficients": np.vectorize(_fraction_repr, otypes=[object])(ineq.coeffs).tolist()}
    if ineq.bound is not None:
        doc["bound"] = _fraction_repr(ineq.bound)
    if getattr(ineq, "bound_conjectured", False):
        doc["bound_conjectured"] = True
    return doc


def inequality_from_dict(doc: dict) -> CorrelationInequality | ProbabilityInequality:
    try:
        form = doc["form"]
        coeffs = doc["coefficients"]
        bound = doc.get("bound")
        bound = None if bound is None else to_fraction(bound)
        name = doc.get("name", "unnamed")
        if form == "correlation":
            ineq = CorrelationInequality(name, coeffs, bound,
                                         bound_conjectured=bool(doc.get("bound_conjectured", False)))
            if (ineq.m_a, ineq.m_b) != (doc["mA"], doc["mB"]):
                raise BellError("coefficient matrix does not match mA x mB")
            return ineq
        if form == "probability":
            ineq = ProbabilityInequality(name, np.array(coeffs, dtype=object), bound)
            if ineq.shape != (doc["kA"], doc["kB"], doc["mA"], doc["mB"]):
                raise BellError("coefficient tensor does not match kA x kB x mA x mB")
            return ineq
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise BellError(f"malformed inequality document: {exc}") from exc
    raise BellError(f"unknown form {form!r}")


def dumps_inequality(ineq) -> str:
    return json.dumps(inequality_to_dict(ineq))


def loads_inequality(text: str):
    return inequality_from_dict(json.loads(text))


INEQUALITY_SCHEMA = {
    "type": "object",
    "required": ["name", "form", "mA", "mB", "kA", "kB", "coefficients"],
    "properties": {
        "name": {"type": "string"},
        "form": {"enum": ["correlation", "probability"]},
        "mA": {"type": "integer", "minimum": 1},
        "mB": {"type": "integer", "minimum": 1},
        "kA": {"type": "integer", "minimum": 1},
        "kB": {"type": "integer", "minimum": 1},
        "coefficients": {"type": "array"},
        "bound": {"type": ["integer", "string"]},
        "bound_conjectured": {"type": "boolean"},
    },
}
