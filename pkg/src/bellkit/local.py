"""Exact local bounds and facet certification by deterministic-vertex enumeration."""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Literal, Sequence

import numpy as np

from .core import (BellError, CorrelationInequality, LimitExceeded, ProbabilityInequality,
                   integer_scaled)

MAX_CORRELATION_INPUTS = 30
MAX_ALICE_STRATEGIES = 10**7
MAX_FACET_VERTICES = 2**26
LOW_BLOCK_BITS = 16

Space = Literal["full", "correlation"]


def sign_table(bits: int) -> np.ndarray:
    """All vectors in {+1,-1}^bits, row i has -1 where bit j of i is set."""
    idx = np.arange(2**bits, dtype=np.int64)[:, None]
    return 1 - 2 * ((idx >> np.arange(bits, dtype=np.int64)) & 1)


def gray_flips(bits: int) -> Iterable[int]:
    """Index of the bit flipped at each step of the reflected Gray code."""
    for i in range(1, 2**bits):
        yield (i & -i).bit_length() - 1


def local_bound_correlation(ineq: CorrelationInequality,
                            max_inputs: int = MAX_CORRELATION_INPUTS) -> Fraction:
    """Max of ``sum_xy M_xy a_x b_y`` over deterministic +/-1 assignments.

    One side is enumerated (the smaller one); the other answers each input
    with the sign of its row sum, giving ``sum_x |sum_y M_xy b_y|``. The
    last enumerated sign is pinned to +1 by global sign symmetry. The low
    16 free signs are tabulated in one matrix product and the remaining
    high signs are walked in Gray-code order with one column update per
    step.
    """
    M, scale = integer_scaled(np.array(ineq.matrix, dtype=object))
    if M.shape[1] > M.shape[0]:
        M = M.T
    n = M.shape[1]
    if n > max_inputs:
        raise LimitExceeded(f"{n} enumerated inputs exceeds the cap of {max_inputs}; "
                            "use the family closed form for large AS_n")
    free = n - 1
    k = min(free, LOW_BLOCK_BITS)
    h = free - k
    low_cols = np.arange(k)
    high_cols = np.arange(k, free)
    S = sign_table(k).astype(M.dtype)
    # rows: low assignments, columns: enumerated-side row sums of the other party
    low = S @ M[:, low_cols].T + M[:, n - 1]
    high_signs = np.ones(h, dtype=np.int64)
    high = M[:, high_cols].sum(axis=1) if h else np.zeros(M.shape[0], dtype=M.dtype)
    best = np.abs(low + high).sum(axis=1).max()
    for j in gray_flips(h):
        high = high - 2 * high_signs[j] * M[:, high_cols[j]]
        high_signs[j] = -high_signs[j]
        best = max(best, np.abs(low + high).sum(axis=1).max())
    return Fraction(int(best), scale)


def naive_local_bound_correlation(ineq: CorrelationInequality, max_total: int = 20) -> Fraction:
    """Reference bound over all ``2^(m_a+m_b)`` sign pairs, with no symmetry reduction."""
    M, scale = integer_scaled(np.array(ineq.matrix, dtype=object))
    m_a, m_b = M.shape
    if m_a + m_b > max_total:
        raise LimitExceeded(f"naive enumeration limited to m_a+m_b <= {max_total}")
    values = sign_table(m_a).astype(M.dtype) @ M @ sign_table(m_b).astype(M.dtype).T
    return Fraction(int(values.max()), scale)


def _mixed_radix(start: int, stop: int, radix: int, digits: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    return (idx // radix ** np.arange(digits, dtype=np.int64)) % radix


def local_bound_probability(ineq: ProbabilityInequality,
                            max_strategies: int = MAX_ALICE_STRATEGIES) -> Fraction:
    """Max over Alice's deterministic strategies with Bob best-responding per input."""
    C, scale = integer_scaled(ineq.coeffs)
    k_a, k_b, n_a, n_b = C.shape
    total = k_a**n_a
    if total > max_strategies:
        raise LimitExceeded(f"{total} Alice strategies exceeds the cap of {max_strategies}")
    T = np.transpose(C, (2, 0, 1, 3))  # (x, a, b, y)
    xs = np.arange(n_a)
    chunk = max(1, 4_000_000 // max(1, k_b * n_b * n_a))
    best = None
    for start in range(0, total, chunk):
        strat = _mixed_radix(start, min(total, start + chunk), k_a, n_a)
        contrib = T[xs[None, :], strat].sum(axis=1)  # (S, b, y)
        vals = contrib.max(axis=1).sum(axis=1)
        top = vals.max()
        best = top if best is None else max(best, top)
    return Fraction(int(best), scale)


def affine_rank(points: Iterable[Sequence[int]], stop_at: int | None = None) -> int:
    """Dimension of the affine hull of integer points, by exact elimination.

    Differences from the first point are reduced against an echelon basis
    using integer row operations, dividing out the row gcd to keep entries
    small. Stops early once the rank reaches ``stop_at``.
    """
    basis: list[tuple[int, list[int]]] = []
    origin = None
    for pt in points:
        if origin is None:
            origin = [int(v) for v in pt]
            if stop_at == 0:
                return 0
            continue
        v = [int(p) - o for p, o in zip(pt, origin)]
        for col, row in basis:
            c = v[col]
            if c:
                r = row[col]
                v = [r * vi - c * ri for vi, ri in zip(v, row)]
                g = 0
                for vi in v:
                    g = gcd(g, vi)
                if g > 1:
                    v = [vi // g for vi in v]
        pivot = next((i for i, vi in enumerate(v) if vi), None)
        if pivot is not None:
            basis.append((pivot, v))
            if stop_at is not None and len(basis) >= stop_at:
                break
    return len(basis)


@dataclass(frozen=True)
class FacetReport:
    is_facet: bool
    polytope_dim: int
    saturating_vertex_count: int
    affine_rank: int
    space: str

    def to_dict(self) -> dict:
        d = asdict(self)
        d["saturating_vertices"] = d.pop("saturating_vertex_count")
        return d


def _correlation_vertices(ineq: CorrelationInequality, space: Space):
    M, scale = integer_scaled(np.array(ineq.matrix, dtype=object))
    m_a, m_b = M.shape
    if 2 ** (m_a + m_b) > MAX_FACET_VERTICES:
        raise LimitExceeded(f"2^{m_a + m_b} vertices exceeds the facet-check cap")
    target = ineq.bound * scale
    if target.denominator != 1:
        return 0, iter(())
    target = int(target)
    SA = sign_table(m_a)
    SB = sign_table(m_b)
    if space == "correlation":
        # a and -a give the same product vertex
        SA = SA[SA[:, m_a - 1] == 1]
    MB = (M @ SB.astype(M.dtype).T)  # (m_a, 2^m_b)
    hits = []
    for i, a in enumerate(SA):
        vals = a.astype(M.dtype) @ MB
        for j in np.flatnonzero(vals == target):
            hits.append((i, int(j)))

    def points():
        for i, j in hits:
            a, b = SA[i], SB[j]
            prod = np.outer(a, b).ravel()
            yield np.concatenate([a, b, prod]) if space == "full" else prod

    return len(hits), points()


def _probability_vertices(ineq: ProbabilityInequality):
    C, scale = integer_scaled(ineq.coeffs)
    k_a, k_b, n_a, n_b = C.shape
    count = k_a**n_a * k_b**n_b
    if count > MAX_FACET_VERTICES:
        raise LimitExceeded(f"{count} vertices exceeds the facet-check cap")
    target = ineq.bound * scale
    if target.denominator != 1:
        return 0, iter(())
    target = int(target)
    xs, ys = np.arange(n_a), np.arange(n_b)
    hits = []
    for sa in itertools.product(range(k_a), repeat=n_a):
        for sb in itertools.product(range(k_b), repeat=n_b):
            if C[np.array(sa)[:, None], np.array(sb)[None, :], xs[:, None], ys[None, :]].sum() == target:
                hits.append((sa, sb))

    def points():
        for sa, sb in hits:
            p = np.zeros((k_a, k_b, n_a, n_b), dtype=np.int64)
            p[np.array(sa)[:, None], np.array(sb)[None, :], xs[:, None], ys[None, :]] = 1
            yield p.ravel()

    return len(hits), points()


def probability_polytope_dim(k_a: int, k_b: int, n_a: int, n_b: int) -> int:
    return (n_a * (k_a - 1) + 1) * (n_b * (k_b - 1) + 1) - 1


def facet_check(ineq: CorrelationInequality | ProbabilityInequality,
                space: Space = "full") -> FacetReport:
    """Decide whether the saturating local vertices span a facet.

    Correlation inequalities are checked either in the full binary
    behavior space (marginals plus correlators, dimension
    ``m_a*m_b + m_a + m_b``) or in the correlator-only space (dimension
    ``m_a*m_b``). Probability inequalities are checked in the full
    probability space.
    """
    if ineq.bound is None:
        raise BellError(f"{ineq.name}: bound missing; compute it before a facet check")
    if isinstance(ineq, CorrelationInequality):
        if space not in ("full", "correlation"):
            raise BellError(f"unknown space {space!r}")
        m_a, m_b = ineq.m_a, ineq.m_b
        dim = m_a * m_b + (m_a + m_b if space == "full" else 0)
        count, pts = _correlation_vertices(ineq, space)
    else:
        space = "full"
        dim = probability_polytope_dim(*ineq.shape)
        count, pts = _probability_vertices(ineq)
    rank = affine_rank(pts, stop_at=dim) if count else 0
    return FacetReport(count > 0 and rank == dim - 1, dim, count, rank, space)
