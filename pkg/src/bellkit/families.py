"""The AS_n and diagonal (D) correlation inequality families, and a catalog."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Sequence

from .core import BellError, CorrelationInequality
from .local import local_bound_correlation

AS_ENUMERATION_LIMIT = 26


@dataclass(frozen=True)
class FamilySpec:
    family: Literal["AS", "D"]
    n: int
    first_row: tuple[int, ...] = ()

    def __post_init__(self):
        if self.family == "AS":
            if self.n < 2 or self.n % 2:
                raise BellError(f"AS_n needs an even n >= 2, got {self.n}")
        elif self.family == "D":
            if not self.first_row:
                raise BellError("D family needs a non-empty first row")
            if self.n != len(self.first_row):
                raise BellError("n must equal the first-row length for the D family")
        else:
            raise BellError(f"unknown family {self.family!r}")

    def build(self) -> CorrelationInequality:
        return gen_as(self.n) if self.family == "AS" else gen_d(self.first_row)


def as_matrix(n: int) -> list[list[int]]:
    """Row 1 is all ones; row k has ones in its first n-k+1 columns, then
    ``-min(k-1, n-k+1)``, then zeros."""
    if n < 2 or n % 2:
        raise BellError(f"AS_n needs an even n >= 2, got {n}")
    rows = [[1] * n]
    for k in range(2, n + 1):
        ones = n - k + 1
        rows.append([1] * ones + [-min(k - 1, ones)] + [0] * (k - 2))
    return rows


def as_bound_formula(n: int) -> int:
    return n * (n + 2) // 4


def gen_as(n: int) -> CorrelationInequality:
    """AS_n with its local bound.

    Up to ``n = 26`` the bound is enumerated exactly; above that the closed
    form ``n(n+2)/4`` is attached and flagged as conjectured.
    """
    ineq = CorrelationInequality(f"AS{n}", as_matrix(n))
    if n <= AS_ENUMERATION_LIMIT:
        return ineq.with_bound(local_bound_correlation(ineq))
    return ineq.with_bound(as_bound_formula(n), conjectured=True)


def shift_rows(first_row: Sequence[int]) -> list[list[int]]:
    """Each row is the previous one shifted left, the dropped entry re-entering negated on the right."""
    rows = [list(first_row)]
    for _ in range(len(first_row) - 1):
        prev = rows[-1]
        rows.append(prev[1:] + [-prev[0]])
    return rows


def gen_d(first_row: Sequence[int], name: str | None = None) -> CorrelationInequality:
    if not len(first_row):
        raise BellError("D family needs a non-empty first row")
    row = [int(v) for v in first_row]
    ineq = CorrelationInequality(name or "D(" + " ".join(map(str, row)) + ")", shift_rows(row))
    return ineq.with_bound(local_bound_correlation(ineq))


S3X4_PRINTED = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]

# name -> (builder, printed bound)
_D_ROWS = {
    "D4": ((2, 1, 1, 2), 10),
    "D5_1": ((1, 1, 0, 1, 1), 8),
    "D5_2": ((3, 2, 1, 1, 3), 20),
    "D6_1": ((1, 0, 1, 0, 1, 1), 10),
    "D6_2": ((3, 1, 1, 1, 2, 4), 28),
    "D6_3": ((4, 2, 2, 1, 2, 5), 36),
    "D6_4": ((4, 2, 2, 1, 3, 6), 42),
}
_PRINTED_BOUNDS = {"CHSH": 2, "AS4": 6, "AS6": 12, "AS8": 20, "S3x4": 6,
                   **{k: b for k, (_, b) in _D_ROWS.items()}}
CATALOG_NAMES = tuple(_PRINTED_BOUNDS)


def _raw(name: str) -> CorrelationInequality:
    if name == "CHSH":
        return CorrelationInequality("CHSH", [[1, 1], [1, -1]])
    if name in ("AS4", "AS6", "AS8"):
        return CorrelationInequality(name, as_matrix(int(name[2:])))
    if name in _D_ROWS:
        return CorrelationInequality(name, shift_rows(_D_ROWS[name][0]))
    if name == "S3x4":
        return CorrelationInequality("S3x4", S3X4_PRINTED, rows_are_bob=True)
    raise BellError(f"unknown catalog inequality {name!r}; known: {', '.join(CATALOG_NAMES)}")


@lru_cache(maxsize=None)
def catalog(name: str) -> CorrelationInequality:
    """Printed inequality with its printed bound, re-derived by enumeration on load."""
    ineq = _raw(name)
    printed = Fraction(_PRINTED_BOUNDS[name])
    derived = local_bound_correlation(ineq)
    if derived != printed:
        raise AssertionError(f"{name}: enumerated bound {derived} != printed bound {printed}")
    return ineq.with_bound(printed)
