"""See-saw maximization over unit-vector strategies and the thresholds built on it."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, NamedTuple, Sequence

import numpy as np

from .core import (BellError, CorrelationInequality, CorrelatorTable, correlators_from_behavior,
                   evaluate_correlation)
from .quantum import (ProjectiveMeasurementSet, behavior_from_quantum, two_qubit_correlators,
                      werner_density)

log = logging.getLogger(__name__)

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int | None = None  # None: 32 for up to 10 inputs per side, else 128
    tol: float = 1e-12
    max_iters: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.restarts is not None and self.restarts < 1:
            raise BellError("restarts must be >= 1")
        if self.tol <= 0:
            raise BellError("tol must be positive")

    def restarts_for(self, m: int) -> int:
        if self.restarts is not None:
            return self.restarts
        return 32 if m <= 10 else 128


@dataclass(frozen=True, eq=False)
class VectorStrategy:
    """Unit vectors per input; realizes ``E(x,y) = V * a_x . b_y``."""

    a_vectors: np.ndarray
    b_vectors: np.ndarray
    visibility: float = 1.0

    def __post_init__(self):
        a = np.array(self.a_vectors, dtype=float)
        b = np.array(self.b_vectors, dtype=float)
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
            raise BellError("vector strategy needs two stacks of equal-dimension vectors")
        for v in (a, b):
            if np.max(np.abs(np.linalg.norm(v, axis=1) - 1)) > UNIT_TOL:
                raise BellError("strategy vectors must be unit norm")
        if not 0 <= self.visibility <= 1:
            raise BellError("visibility outside [0, 1]")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a_vectors", a)
        object.__setattr__(self, "b_vectors", b)

    @property
    def dim(self) -> int:
        return self.a_vectors.shape[1]

    def correlators(self) -> np.ndarray:
        return self.visibility * self.a_vectors @ self.b_vectors.T

    def to_dict(self) -> dict:
        return {"dim": self.dim, "visibility": self.visibility,
                "a_vectors": self.a_vectors.tolist(), "b_vectors": self.b_vectors.tolist()}


class SeesawResult(NamedTuple):
    value: float
    strategy: VectorStrategy
    trace: list[float] = []


def _normalize_rows(target: np.ndarray, previous: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(target, axis=1, keepdims=True)
    # zero update: keep the previous direction
    zero = norms[:, 0] < 1e-300
    return np.where(zero[:, None], previous, target / np.where(zero[:, None], 1.0, norms))


def _random_unit(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def seesaw_run(M: np.ndarray, b_init: np.ndarray, tol: float, max_iters: int,
               strict: bool = False) -> tuple[float, np.ndarray, np.ndarray, list[float]]:
    """One see-saw descent from Bob's initial vectors; returns the value trace."""
    b = b_init
    a = np.zeros((M.shape[0], b.shape[1]))
    a[:, 0] = 1.0
    trace = []
    value = -np.inf
    for _ in range(max_iters):
        a = _normalize_rows(M @ b, a)
        b = _normalize_rows(M.T @ a, b)
        new = float(np.sum(M * (a @ b.T)))
        if strict and new < value - 1e-12 * max(1.0, abs(value)):
            raise AssertionError(f"see-saw value decreased: {value} -> {new}")
        trace.append(new)
        done = new - value < tol
        value = max(value, new)
        if done:
            break
    return value, a, b, trace


def seesaw_value(ineq: CorrelationInequality | np.ndarray, d: int,
                 cfg: OptimizerConfig = OptimizerConfig(), keep_trace: bool = False) -> SeesawResult:
    """Maximize ``sum_xy M_xy a_x . b_y`` over unit vectors in ``R^d``.

    Alternates ``a_x <- normalize(sum_y M_xy b_y)`` and
    ``b_y <- normalize(sum_x M_xy a_x)``; each half-step is the exact
    optimum for its side, so the value never decreases. The best of the
    seeded restarts wins, ties going to the lowest restart index.
    """
    if d < 1:
        raise BellError("dimension must be >= 1")
    M = ineq.as_array() if isinstance(ineq, CorrelationInequality) else np.asarray(ineq, float)
    rng = np.random.default_rng(cfg.seed)
    best = None
    for r in range(cfg.restarts_for(max(M.shape))):
        b0 = _random_unit(rng, M.shape[1], d)
        value, a, b, trace = seesaw_run(M, b0, cfg.tol, cfg.max_iters)
        if best is None or value > best[0]:
            best = (value, a, b, trace)
    value, a, b, trace = best
    log.debug("seesaw d=%d best=%.12f", d, value)
    return SeesawResult(value, VectorStrategy(a, b), trace if keep_trace else [])


class VisibilityResult(NamedTuple):
    visibility: float
    quantum_value: float
    bound: float
    conjectured: bool


def visibility_threshold(ineq: CorrelationInequality, d: int = 2,
                         cfg: OptimizerConfig = OptimizerConfig()) -> VisibilityResult:
    """Smallest noise visibility at which the optimal vector strategy still violates."""
    if ineq.bound is None:
        raise BellError(f"{ineq.name}: bound missing")
    q = seesaw_value(ineq, d, cfg).value
    return VisibilityResult(float(ineq.bound) / q, q, float(ineq.bound), ineq.bound_conjectured)


class GeometryReport(NamedTuple):
    alice_gram: np.ndarray
    bob_gram: np.ndarray
    planar: bool


def geometry_report(strategy: VectorStrategy, plane_tol: float = 1e-6) -> GeometryReport:
    a, b = strategy.a_vectors, strategy.b_vectors
    stacked = np.vstack([a, b])
    sv = np.linalg.svd(stacked, compute_uv=False)
    # distance of the farthest vector from the best 2-plane is bounded by the 3rd singular value
    planar = len(sv) <= 2 or sv[2] <= plane_tol
    return GeometryReport(a @ a.T, b @ b.T, bool(planar))


# --- detection efficiency ---------------------------------------------------

@dataclass(frozen=True)
class DetectionModel:
    """Per-side efficiencies; a missed detection is reported as outcome +1."""

    eta_a: float
    eta_b: float

    def __post_init__(self):
        if not (0 <= self.eta_a <= 1 and 0 <= self.eta_b <= 1):
            raise BellError("detection efficiencies must lie in [0, 1]")


def observed_correlators(E, A, B, model: DetectionModel):
    ea, eb = model.eta_a, model.eta_b
    E, A, B = np.asarray(E), np.asarray(A), np.asarray(B)
    return (ea * eb * E + ea * (1 - eb) * A[:, None] + (1 - ea) * eb * B[None, :]
            + (1 - ea) * (1 - eb))


def detection_value(ineq: CorrelationInequality, theta: float,
                    a_settings: Sequence[Sequence[float]], b_settings: Sequence[Sequence[float]],
                    model: DetectionModel) -> float:
    """Bell value seen through lossy detectors on ``cos(t)|00> + sin(t)|11>``."""
    if len(a_settings) != ineq.m_a or len(b_settings) != ineq.m_b:
        raise BellError("settings do not match the inequality's input counts")
    E = np.empty((ineq.m_a, ineq.m_b))
    A = np.empty(ineq.m_a)
    B = np.empty(ineq.m_b)
    for x, a in enumerate(a_settings):
        for y, b in enumerate(b_settings):
            E[x, y], A[x], B[y] = two_qubit_correlators(theta, a, b)
    return float(np.sum(ineq.as_array() * observed_correlators(E, A, B, model)))


def _planar_to_bloch(v: np.ndarray) -> np.ndarray:
    # planar coordinates are (x, z)
    return np.column_stack([v[:, 0], np.zeros(len(v)), v[:, 1]])


def _detection_seesaw(M, theta, model, b0, tol, max_iters):
    """Alternating exact maximization in the x-z plane.

    The lossy value is affine in each of Alice's unit vectors once Bob is
    fixed (and vice versa), so the per-side optimum is the normalized
    gradient.
    """
    ea, eb = model.eta_a, model.eta_b
    s2, c2 = np.sin(2 * theta), np.cos(2 * theta)
    row, col = M.sum(axis=1), M.sum(axis=0)
    const = (1 - ea) * (1 - eb) * M.sum()

    def value(a, b):
        E = a[:, 1:2] @ b[:, 1:2].T + s2 * a[:, :1] @ b[:, :1].T
        return (ea * eb * np.sum(M * E) + ea * (1 - eb) * c2 * row @ a[:, 1]
                + (1 - ea) * eb * c2 * col @ b[:, 1] + const)

    b = b0
    a = np.tile([0.0, 1.0], (M.shape[0], 1))
    best = -np.inf
    for _ in range(max_iters):
        mb = M @ b
        ga = ea * eb * np.column_stack([s2 * mb[:, 0], mb[:, 1]])
        ga[:, 1] += ea * (1 - eb) * c2 * row
        a = _normalize_rows(ga, a)
        ma = M.T @ a
        gb = ea * eb * np.column_stack([s2 * ma[:, 0], ma[:, 1]])
        gb[:, 1] += (1 - ea) * eb * c2 * col
        b = _normalize_rows(gb, b)
        v = value(a, b)
        done = v - best < tol
        best = max(best, v)
        if done:
            break
    return best, a, b


class DetectionOptimum(NamedTuple):
    value: float
    a_settings: np.ndarray
    b_settings: np.ndarray


def optimize_detection(ineq: CorrelationInequality, theta: float, model: DetectionModel,
                       cfg: OptimizerConfig = OptimizerConfig()) -> DetectionOptimum:
    """Best lossy Bell value over planar (x-z) qubit settings."""
    M = ineq.as_array()
    rng = np.random.default_rng(cfg.seed)
    best = None
    for _ in range(cfg.restarts_for(max(M.shape))):
        b0 = _random_unit(rng, M.shape[1], 2)
        v, a, b = _detection_seesaw(M, theta, model, b0, cfg.tol, cfg.max_iters)
        if best is None or v > best[0]:
            best = (v, a, b)
    v, a, b = best
    return DetectionOptimum(v, _planar_to_bloch(a), _planar_to_bloch(b))


class DetectionThreshold(NamedTuple):
    eta_star: float | None
    a_settings: np.ndarray | None
    b_settings: np.ndarray | None


def detection_threshold(ineq: CorrelationInequality, theta: float,
                        shape: Literal["symmetric", "fixed_b"] = "symmetric",
                        eta_b: float = 1.0, cfg: OptimizerConfig = OptimizerConfig(),
                        eta_tol: float = 1e-6, margin: float = 1e-9) -> DetectionThreshold:
    """Smallest efficiency whose optimized lossy value exceeds the local bound.

    ``shape="symmetric"`` scans ``eta_a = eta_b = eta``; ``"fixed_b"`` scans
    ``eta_a`` with Bob's efficiency held at ``eta_b``. Returns
    ``eta_star=None`` when even perfect detection gives no violation.
    """
    if ineq.bound is None:
        raise BellError(f"{ineq.name}: bound missing")
    bound = float(ineq.bound)

    def model(eta):
        return DetectionModel(eta, eta) if shape == "symmetric" else DetectionModel(eta, eta_b)

    def violates(eta):
        opt = optimize_detection(ineq, theta, model(eta), cfg)
        return opt.value > bound + margin, opt

    ok, opt = violates(1.0)
    if not ok:
        return DetectionThreshold(None, None, None)
    lo, hi = 0.0, 1.0
    best = opt
    while hi - lo > eta_tol:
        mid = (lo + hi) / 2
        ok, opt = violates(mid)
        if ok:
            hi, best = mid, opt
        else:
            lo = mid
    return DetectionThreshold(hi, best.a_settings, best.b_settings)


# --- Werner states ----------------------------------------------------------

def werner_bell_value(ineq: CorrelationInequality, W: float,
                      cfg: OptimizerConfig = OptimizerConfig(restarts=8)) -> float:
    """Optimized Bell value on a two-qubit Werner state, evaluated by the Born rule.

    Settings come from the d=3 see-saw; Bob's Bloch vectors are flipped
    because the singlet anticorrelates.
    """
    res = seesaw_value(ineq, 3, cfg)
    alice = ProjectiveMeasurementSet.from_bloch(res.strategy.a_vectors)
    bob = ProjectiveMeasurementSet.from_bloch(-res.strategy.b_vectors)
    behavior = behavior_from_quantum(werner_density(W), alice, bob)
    table = correlators_from_behavior(behavior)
    return evaluate_correlation(ineq, CorrelatorTable(table.E))


def werner_crossing(ineq: CorrelationInequality, cfg: OptimizerConfig = OptimizerConfig(restarts=8),
                    tol: float = 1e-8) -> float:
    """Visibility ``W`` at which the optimized Werner value crosses the local bound."""
    bound = float(ineq.bound)
    if werner_bell_value(ineq, 1.0, cfg) <= bound:
        raise BellError(f"{ineq.name} is not violated by the singlet")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if werner_bell_value(ineq, mid, cfg) > bound:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2
