import itertools
import random
from fractions import Fraction

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellkit.core import BellError, CorrelationInequality, LimitExceeded, ProbabilityInequality
from bellkit.families import catalog, gen_as
from bellkit.local import (affine_rank, facet_check, gray_flips, local_bound_correlation,
                           local_bound_probability, naive_local_bound_correlation,
                           probability_polytope_dim, sign_table)
from bellkit.shb import shb_inequality

FACET_SCHEMA = {
    "type": "object",
    "required": ["is_facet", "polytope_dim", "saturating_vertices", "affine_rank", "space"],
    "properties": {
        "is_facet": {"type": "boolean"},
        "polytope_dim": {"type": "integer"},
        "saturating_vertices": {"type": "integer"},
        "affine_rank": {"type": "integer"},
        "space": {"enum": ["full", "correlation"]},
    },
}


@pytest.mark.parametrize("name,bound", [("CHSH", 2), ("AS6", 12), ("D6_3", 36)])
def test_local_bound_examples(name, bound):
    assert local_bound_correlation(catalog(name)) == bound


def test_gray_flips_visit_every_assignment():
    state, seen = 0, {0}
    for j in gray_flips(5):
        state ^= 1 << j
        seen.add(state)
    assert seen == set(range(32))


def test_sign_table():
    np.testing.assert_array_equal(sign_table(2), [[1, 1], [-1, 1], [1, -1], [-1, -1]])


def test_enumeration_cap():
    with pytest.raises(LimitExceeded):
        local_bound_correlation(CorrelationInequality("big", np.ones((31, 31), dtype=int).tolist()))


def test_high_gray_block_used():
    # 20 inputs per side forces 3 Gray-walked high bits beyond the tabulated block
    rng = np.random.default_rng(5)
    M = rng.integers(-2, 3, (3, 20)).tolist()
    ineq = CorrelationInequality("wide", M)
    assert local_bound_correlation(ineq) == naive_local_bound_correlation(ineq, max_total=23)


def _brute_rowsum_bound(M):
    """max_b sum_x |sum_y M_xy b_y| with plain itertools."""
    M = [[Fraction(c) for c in row] for row in M]
    return max(sum(abs(sum(c * s for c, s in zip(row, b))) for row in M)
               for b in itertools.product((1, -1), repeat=len(M[0])))


matrices = st.integers(1, 8).flatmap(lambda m_a: st.integers(1, 8).flatmap(
    lambda m_b: st.lists(st.lists(st.integers(-4, 4), min_size=m_b, max_size=m_b),
                         min_size=m_a, max_size=m_a)))


@given(matrices)
@settings(max_examples=150, deadline=None)
def test_fast_path_matches_naive_enumeration(rows):
    ineq = CorrelationInequality("rand", rows)
    assert local_bound_correlation(ineq) == naive_local_bound_correlation(ineq, max_total=16)


@given(st.lists(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=6),
                         min_size=3, max_size=3), min_size=2, max_size=4))
@settings(max_examples=40, deadline=None)
def test_rational_coefficients_exact(rows):
    ineq = CorrelationInequality("frac", rows)
    assert local_bound_correlation(ineq) == _brute_rowsum_bound(rows)


@given(matrices, st.integers(1, 5))
@settings(max_examples=50, deadline=None)
def test_bound_scales_with_positive_factor(rows, c):
    ineq = CorrelationInequality("rand", rows)
    assert local_bound_correlation(ineq.scaled(c)) == c * local_bound_correlation(ineq)


def test_probability_bound_examples():
    assert local_bound_probability(shb_inequality(2, 2)) == 2
    assert local_bound_probability(shb_inequality(3, 2)) == 6
    trivial = ProbabilityInequality("one", np.full((1, 1, 1, 1), 5, dtype=object))
    assert local_bound_probability(trivial) == 5


def _brute_probability_bound(C):
    k_a, k_b, n_a, n_b = C.shape
    best = None
    for sa in itertools.product(range(k_a), repeat=n_a):
        for sb in itertools.product(range(k_b), repeat=n_b):
            v = sum(C[sa[x], sb[y], x, y] for x in range(n_a) for y in range(n_b))
            best = v if best is None else max(best, v)
    return best


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3),
       st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_probability_bound_matches_full_enumeration(k_a, k_b, n_a, n_b, seed):
    rng = np.random.default_rng(seed)
    C = rng.integers(-3, 4, (k_a, k_b, n_a, n_b))
    ineq = ProbabilityInequality("rand", C.astype(object))
    assert local_bound_probability(ineq) == _brute_probability_bound(C)


def test_probability_bound_cap():
    with pytest.raises(LimitExceeded):
        local_bound_probability(ProbabilityInequality("x", np.zeros((10, 2, 8, 1), dtype=object)))


def test_chsh_is_facet():
    rep = facet_check(catalog("CHSH"))
    assert (rep.is_facet, rep.polytope_dim, rep.affine_rank, rep.saturating_vertex_count) == (True, 8, 7, 8)


def test_chsh_rank_float_crosscheck():
    # independent floating-point rank of the 8 saturating vertices (tiny +/-1 matrix)
    pts = []
    for a in itertools.product((1, -1), repeat=2):
        for b in itertools.product((1, -1), repeat=2):
            if a[0] * b[0] + a[0] * b[1] + a[1] * b[0] - a[1] * b[1] == 2:
                pts.append(list(a) + list(b) + list(np.outer(a, b).ravel()))
    pts = np.array(pts, dtype=float)
    assert np.linalg.matrix_rank(pts[1:] - pts[0]) == 7


def test_s3x4_not_facet():
    for space in ("full", "correlation"):
        assert not facet_check(catalog("S3x4"), space).is_facet


@pytest.mark.parametrize("name", ["AS4", "AS6"])
def test_as_facets(name):
    assert facet_check(catalog(name)).is_facet
    assert facet_check(catalog(name), "correlation").is_facet


def test_facet_needs_bound():
    with pytest.raises(BellError):
        facet_check(CorrelationInequality("nob", [[1, 1], [1, -1]]))


def test_facet_report_json():
    d = facet_check(catalog("CHSH"), "correlation").to_dict()
    jsonschema.validate(d, FACET_SCHEMA)
    assert d["space"] == "correlation" and d["polytope_dim"] == 4


def _relabel_chsh(swap_x, swap_y, flip_a, flip_b):
    M = np.array([[1, 1], [1, -1]])
    if swap_x:
        M = M[::-1]
    if swap_y:
        M = M[:, ::-1]
    M = np.diag(flip_a) @ M @ np.diag(flip_b)
    return CorrelationInequality("chsh'", M.tolist(), 2)


@pytest.mark.parametrize("swap_x,swap_y", list(itertools.product((0, 1), repeat=2)))
@pytest.mark.parametrize("flip_a,flip_b", list(itertools.product(
    list(itertools.product((1, -1), repeat=2)), repeat=2)))
def test_chsh_facet_under_local_symmetries(swap_x, swap_y, flip_a, flip_b):
    ineq = _relabel_chsh(swap_x, swap_y, flip_a, flip_b)
    assert local_bound_correlation(ineq) == 2
    assert facet_check(ineq).is_facet


def test_rank_independent_of_vertex_order():
    from bellkit.local import _correlation_vertices
    _, pts = _correlation_vertices(catalog("AS4"), "full")
    pts = [list(p) for p in pts]
    ranks = {affine_rank(pts)}
    rnd = random.Random(3)
    for _ in range(5):
        rnd.shuffle(pts)
        ranks.add(affine_rank(pts))
    assert ranks == {23}


def test_full_space_polytope_dimension():
    # all 2^(m_a+m_b) vertices span the claimed dimension
    for m_a, m_b in [(2, 2), (2, 3), (3, 4)]:
        pts = [list(a) + list(b) + list(np.outer(a, b).ravel())
               for a in itertools.product((1, -1), repeat=m_a)
               for b in itertools.product((1, -1), repeat=m_b)]
        assert affine_rank(pts) == m_a * m_b + m_a + m_b


def test_probability_polytope_dimension():
    for shape in [(2, 2, 2, 2), (2, 2, 2, 4), (3, 2, 2, 2)]:
        k_a, k_b, n_a, n_b = shape
        pts = []
        for sa in itertools.product(range(k_a), repeat=n_a):
            for sb in itertools.product(range(k_b), repeat=n_b):
                p = np.zeros(shape, dtype=int)
                for x, y in itertools.product(range(n_a), range(n_b)):
                    p[sa[x], sb[y], x, y] = 1
                pts.append(p.ravel())
        assert affine_rank(pts) == probability_polytope_dim(*shape)


def test_probability_form_chsh_is_facet():
    from bellkit.core import correlation_to_probability
    rep = facet_check(correlation_to_probability(catalog("CHSH")))
    assert rep.is_facet and rep.polytope_dim == 8


def test_as_bound_small_n_against_plain_enumeration():
    assert gen_as(12).bound == _brute_rowsum_bound(gen_as(12).matrix) == 42
