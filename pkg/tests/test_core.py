import itertools
import json
from fractions import Fraction

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellkit.core import (INEQUALITY_SCHEMA, Behavior, BellError, CorrelationInequality,
                          CorrelatorTable, DeterministicStrategy, ProbabilityInequality,
                          behavior_from_correlators, correlation_to_probability,
                          correlators_from_behavior, dumps_inequality, evaluate_correlation,
                          evaluate_probability, loads_inequality, nonsignaling_check, pr_box)
from bellkit.families import catalog
from bellkit.local import local_bound_correlation
from bellkit.shb import shb_inequality

SQRT2 = np.sqrt(2)
CHSH = CorrelationInequality("CHSH", [[1, 1], [1, -1]], 2)


def test_chsh_all_ones():
    assert evaluate_correlation(CHSH, CorrelatorTable(np.ones((2, 2)))) == 2


def test_chsh_tsirelson_correlators():
    E = np.array([[1, 1], [1, -1]]) / SQRT2
    assert evaluate_correlation(CHSH, CorrelatorTable(E)) == pytest.approx(2 * SQRT2, abs=1e-12)


def test_as4_all_ones_saturates():
    assert evaluate_correlation(catalog("AS4"), CorrelatorTable(np.ones((4, 4)))) == 6


def test_dimension_mismatch():
    with pytest.raises(BellError):
        evaluate_correlation(CHSH, CorrelatorTable(np.ones((3, 2))))
    with pytest.raises(BellError):
        evaluate_probability(correlation_to_probability(CHSH), Behavior.uniform(2, 2, 3, 2))


def test_pr_box_reaches_four():
    assert evaluate_probability(correlation_to_probability(CHSH), pr_box()) == pytest.approx(4)


def _shb_score_bruteforce(n, m, alice, bob):
    """Direct game scoring for deterministic answers alice(x) and bob(ys)."""
    total = 0
    for x in range(n):
        for ys in itertools.product(range(m), repeat=n):
            if bob(ys) == 1:
                total += 1 if alice(x) == ys[x] else -1
    return total


def test_shb_tensor_on_constant_behavior():
    # a=0 and b=1 always: each x sees y_x=0 on half of Bob's tuples, so the sum cancels
    expected = _shb_score_bruteforce(2, 2, lambda x: 0, lambda ys: 1)
    assert expected == 0
    ineq = shb_inequality(2, 2)
    beh = DeterministicStrategy((0, 0), (1, 1, 1, 1)).to_behavior(2, 2)
    assert evaluate_probability(ineq, beh) == expected


def test_uniform_behavior_gives_mean_coefficient():
    ineq = shb_inequality(2, 3)
    C = ineq.as_array()
    expected = C.sum() / (3 * 2)
    assert evaluate_probability(ineq, Behavior.uniform(3, 2, 2, 9)) == pytest.approx(expected)


def test_correlators_perfect_correlation():
    p = np.zeros((2, 2, 1, 1))
    p[0, 0] = p[1, 1] = 0.5
    t = correlators_from_behavior(Behavior(p))
    assert t.E[0, 0] == 1 and t.A[0] == 0 and t.B[0] == 0


def test_correlators_pr_box():
    # E(x,y) = sum_ab sign(a) sign(b) p(a,b|x,y) computed by hand
    p = pr_box().p
    E = np.array([[sum((1 - 2 * a) * (1 - 2 * b) * p[a, b, x, y] for a in (0, 1) for b in (0, 1))
                   for y in (0, 1)] for x in (0, 1)])
    np.testing.assert_allclose(E, [[1, 1], [1, -1]])
    t = correlators_from_behavior(pr_box())
    np.testing.assert_allclose(t.E, E)
    np.testing.assert_allclose(t.A, 0)
    np.testing.assert_allclose(t.B, 0)


def test_correlators_product_deterministic():
    beh = DeterministicStrategy.from_signs([1], [-1]).to_behavior(2, 2)
    t = correlators_from_behavior(beh)
    assert (t.E[0, 0], t.A[0], t.B[0]) == (-1, 1, -1)


def test_correlators_need_binary():
    with pytest.raises(BellError):
        correlators_from_behavior(Behavior.uniform(3, 2, 1, 1))


def test_behavior_from_correlators_examples():
    p = behavior_from_correlators(CorrelatorTable([[1.0]])).p[:, :, 0, 0]
    np.testing.assert_allclose(p, [[0.5, 0], [0, 0.5]])
    np.testing.assert_allclose(behavior_from_correlators(CorrelatorTable([[0.0]])).p, 0.25)
    np.testing.assert_allclose(behavior_from_correlators(CorrelatorTable([[1, 1], [1, -1]])).p,
                               pr_box().p)


def test_unrealizable_correlators_rejected():
    with pytest.raises(BellError):
        CorrelatorTable([[1.0]], [1.0], [-1.0])


def test_behavior_validation():
    with pytest.raises(BellError):
        Behavior(np.full((2, 2, 1, 1), 0.3))
    p = np.zeros((2, 2, 1, 1))
    p[0, 0] = 1 + 5e-13
    p[1, 1] = -5e-13
    assert Behavior(p).p.min() == 0.0
    p[1, 1] = -1e-6
    p[0, 0] = 1 + 1e-6
    with pytest.raises(BellError):
        Behavior(p)


def test_nonsignaling_pr_box():
    rep = nonsignaling_check(pr_box())
    assert rep.passes and rep.max_deviation == 0


def test_nonsignaling_detects_signaling():
    # Alice's marginal p(a=0|x=0) is 0.5 for y=0 and 0.6 for y=1
    p = np.zeros((2, 2, 1, 2))
    p[0, 0, 0, 0] = p[1, 1, 0, 0] = 0.5
    p[0, 0, 0, 1], p[1, 1, 0, 1] = 0.6, 0.4
    rep = nonsignaling_check(Behavior(p))
    assert not rep.passes
    assert rep.max_deviation == pytest.approx(0.1)


def test_deterministic_strategy_range_checked():
    with pytest.raises(BellError):
        DeterministicStrategy((2,), (0,)).to_behavior(2, 2)


def test_rows_are_bob_orientation():
    s = catalog("S3x4")
    assert (s.m_a, s.m_b) == (3, 4)
    assert len(s.coeffs) == 4


def test_json_roundtrip_and_schema():
    for ineq in (catalog("D5_2"), catalog("S3x4"), shb_inequality(2, 2)):
        doc = json.loads(dumps_inequality(ineq))
        jsonschema.validate(doc, INEQUALITY_SCHEMA)
        back = loads_inequality(json.dumps(doc))
        assert back.bound == ineq.bound
        np.testing.assert_array_equal(back.as_array(), ineq.as_array())


def test_json_rationals():
    doc = {"name": "half", "form": "correlation", "mA": 1, "mB": 2, "kA": 2, "kB": 2,
           "coefficients": [["1/2", 1]], "bound": "3/2"}
    ineq = loads_inequality(json.dumps(doc))
    assert ineq.coeffs[0][0] == Fraction(1, 2)
    assert local_bound_correlation(ineq) == Fraction(3, 2)
    assert json.loads(dumps_inequality(ineq))["coefficients"] == [["1/2", 1]]


def test_json_rejects_mismatched_shape():
    doc = {"name": "x", "form": "correlation", "mA": 2, "mB": 2, "kA": 2, "kB": 2,
           "coefficients": [[1, 1, 1]]}
    with pytest.raises(BellError):
        loads_inequality(json.dumps(doc))


small_matrix = st.integers(1, 4).flatmap(lambda m_a: st.integers(1, 4).flatmap(
    lambda m_b: st.lists(st.lists(st.integers(-3, 3), min_size=m_b, max_size=m_b),
                         min_size=m_a, max_size=m_a)))


@given(small_matrix)
@settings(max_examples=60, deadline=None)
def test_deterministic_vertices_respect_bound(rows):
    ineq = CorrelationInequality("rand", rows)
    ineq = ineq.with_bound(local_bound_correlation(ineq))
    prob = correlation_to_probability(ineq)
    values = []
    for sa in itertools.product((0, 1), repeat=ineq.m_a):
        for sb in itertools.product((0, 1), repeat=ineq.m_b):
            values.append(evaluate_probability(prob, DeterministicStrategy(sa, sb).to_behavior(2, 2)))
    assert max(values) == pytest.approx(float(ineq.bound))


def _random_behavior(rng, n_a, n_b):
    E = rng.uniform(-1, 1, (n_a, n_b))
    A = rng.uniform(-1, 1, n_a)
    B = rng.uniform(-1, 1, n_b)
    # shrink until realizable
    s = 1.0
    while True:
        try:
            return behavior_from_correlators(CorrelatorTable(s * E, s * A, s * B))
        except BellError:
            s *= 0.7


@given(small_matrix, st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_embedding_matches_correlation_value(rows, seed):
    ineq = CorrelationInequality("rand", rows)
    beh = _random_behavior(np.random.default_rng(seed), ineq.m_a, ineq.m_b)
    direct = evaluate_correlation(ineq, correlators_from_behavior(beh))
    assert evaluate_probability(correlation_to_probability(ineq), beh) == pytest.approx(direct, abs=1e-10)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_correlator_roundtrip(n_a, n_b, seed):
    beh = _random_behavior(np.random.default_rng(seed), n_a, n_b)
    back = behavior_from_correlators(correlators_from_behavior(beh))
    np.testing.assert_allclose(back.p, beh.p, atol=1e-12)


def test_probability_inequality_shape_checked():
    with pytest.raises(BellError):
        ProbabilityInequality("bad", np.zeros((2, 2, 2), dtype=object))
