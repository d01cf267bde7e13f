"""The guessing game with a joker: Alice names Bob's x-th symbol, Bob may void the round.

Alice gets ``x in {0..n-1}`` and outputs ``a in {0..m-1}``. Bob gets a
tuple ``(y_0, ..., y_{n-1})`` with ``y_j in {0..m-1}`` and outputs
``b in {0, 1}``. A round with ``b = 0`` scores nothing; with ``b = 1`` it
scores +1 if ``a == y_x`` and -1 otherwise. Bob's tuples are indexed in
base-m lexicographic order (``y_0`` most significant).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, sqrt
from typing import NamedTuple

import numpy as np

from .core import (BellError, CorrelationInequality, LimitExceeded, ProbabilityInequality,
                   evaluate_probability)
from .quantum import (ProjectiveMeasurementSet, behavior_from_quantum, intermediate_projector,
                      maximally_entangled, mub_pair)

MAX_BOB_INPUTS = 10**5
MAX_ORACLE_STRATEGIES = 10**4


@dataclass(frozen=True)
class SHBGame:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 2:
            raise BellError(f"need n >= 1 and m >= 2, got n={self.n}, m={self.m}")

    @property
    def bob_inputs(self) -> int:
        return self.m**self.n

    def tuples(self):
        return itertools.product(range(self.m), repeat=self.n)


def shb_inequality(n: int, m: int) -> ProbabilityInequality:
    game = SHBGame(n, m)
    if game.bob_inputs > MAX_BOB_INPUTS:
        raise LimitExceeded(f"m^n = {game.bob_inputs} Bob inputs exceeds {MAX_BOB_INPUTS}")
    C = np.zeros((m, 2, n, game.bob_inputs), dtype=np.int64)
    for yi, ys in enumerate(game.tuples()):
        for x in range(n):
            C[:, 1, x, yi] = -1
            C[ys[x], 1, x, yi] = 1
    ineq = ProbabilityInequality(f"SHB(n={n},m={m})", C.astype(object))
    return ineq.with_bound(shb_local_formula(n)) if m == 2 else ineq


def shb_local_formula(n: int) -> int:
    """Constant-guess local score ``sum_{r <= (n-1)/2} (n - 2r) C(n, r)``."""
    if n < 1:
        raise BellError("n must be >= 1")
    return sum((n - 2 * r) * comb(n, r) for r in range((n - 1) // 2 + 1))


def shb_local_oracle(n: int, m: int) -> int:
    """Exhaustive local optimum: every Alice function, Bob accepting when it pays."""
    game = SHBGame(n, m)
    if m**n > MAX_ORACLE_STRATEGIES:
        raise LimitExceeded(f"m^n = {m**n} exceeds the oracle cap {MAX_ORACLE_STRATEGIES}")
    tuples = list(game.tuples())
    best = None
    for guess in itertools.product(range(m), repeat=n):
        total = 0
        for ys in tuples:
            score = sum(1 if guess[x] == ys[x] else -1 for x in range(n))
            total += max(0, score)
        best = total if best is None else max(best, total)
    return best


class SHBQuantum(NamedTuple):
    score: float
    alice: ProjectiveMeasurementSet
    bob: ProjectiveMeasurementSet


def shb_quantum_strategy(m: int) -> tuple[ProjectiveMeasurementSet, ProjectiveMeasurementSet]:
    """The n=2 strategy on the maximally entangled state of dimension m.

    Alice measures the complex conjugates of the computational and Fourier
    bases (so that, on ``sum_j |jj>``, Bob's side sees the nominal bases).
    For ``(y_0, y_1)`` Bob projects onto the state midway between ``e_{y_0}``
    and ``f_{y_1}``; success is ``b = 1``.
    """
    if not 2 <= m <= 12:
        raise BellError("quantum strategy implemented for 2 <= m <= 12")
    comp, fourier = mub_pair(m)
    alice = ProjectiveMeasurementSet.from_bases([comp.conj(), fourier.conj()])
    eye = np.eye(m)
    bob = []
    for y0, y1 in itertools.product(range(m), repeat=2):
        P = intermediate_projector(comp[:, y0], fourier[:, y1])
        bob.append((eye - P, P))
    return alice, ProjectiveMeasurementSet(tuple(bob))


def shb_quantum_score(m: int) -> SHBQuantum:
    alice, bob = shb_quantum_strategy(m)
    behavior = behavior_from_quantum(maximally_entangled(m), alice, bob)
    return SHBQuantum(evaluate_probability(shb_inequality(2, m), behavior), alice, bob)


def shb_quantum_formula(m: int) -> float:
    return 2 * sqrt(m)


def bob_grouping(n: int = 3) -> list[tuple[int, int]]:
    """Pair each binary tuple with its complement.

    Returns ``(setting, sign)`` per Bob input index. Even-parity tuples are
    the representatives, numbered in lexicographic order; an odd-parity
    tuple reuses its complement's setting with the outcome relabeled.
    """
    reps = [ys for ys in itertools.product((0, 1), repeat=n) if sum(ys) % 2 == 0]
    out = []
    for ys in itertools.product((0, 1), repeat=n):
        if sum(ys) % 2 == 0:
            out.append((reps.index(ys), 1))
        else:
            out.append((reps.index(tuple(1 - v for v in ys)), -1))
    return out


def shb_correlation_form(n: int = 3, m: int = 2) -> CorrelationInequality:
    """Correlation form of the binary game with Bob's tuples paired by complement.

    With ``1[b=1] = (1 + B)/2`` and Alice's marginal independent of Bob's
    input, each score term becomes ``(-1)^{y_x} E(x, y) / 2``; complementary
    tuples measured as one observable with flipped outcome contribute
    equally, so each pair gives ``(-1)^{y_x} E(x, pair)``. Printed with
    Bob's settings as rows.
    """
    if (n, m) != (3, 2):
        raise BellError("correlation form is only defined here for n=3, m=2")
    groups = bob_grouping(n)
    rows = [[0] * n for _ in range(len(groups) // 2)]
    for yi, ys in enumerate(itertools.product((0, 1), repeat=n)):
        setting, sign = groups[yi]
        if sign == 1:
            for x in range(n):
                rows[setting][x] = 1 - 2 * ys[x]
    return CorrelationInequality("S3x4", rows, shb_local_formula(n), rows_are_bob=True)
