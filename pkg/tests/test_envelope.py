import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import LOG2, QUAD_ZERO
from metric_heights.envelope import (
    DegeneratePairError,
    ExpSum,
    VectorSet,
    asymptotic_min,
    envelope_from_dict,
    exp_sum_from_pair,
    exp_sum_zeros,
    intersection_points,
    lower_envelope,
    min_norm,
    zero_upper_bound,
)
from metric_heights.norms import HeightVector, lt_norm

LOG4 = 2 * LOG2
INF = math.inf


def test_exp_sum_validation():
    with pytest.raises(ValueError):
        ExpSum(((1.0, 1.0), (1.0, 2.0)))
    with pytest.raises(ValueError):
        ExpSum(((0.0, 2.0),))
    F = ExpSum.from_terms([(1, 1), (2, 3), (-2, 3), (5, 2)])
    assert F.terms == ((5.0, 2.0), (1.0, 1.0))


def test_exp_sum_from_pair_examples():
    assert exp_sum_from_pair([LOG4], [LOG2, LOG2]).terms == ((1.0, LOG4), (-2.0, LOG2))
    assert exp_sum_from_pair([2], [1]).terms == ((1.0, 2.0), (-1.0, 1.0))
    assert exp_sum_from_pair([2, 1], [2]).terms == ((1.0, 1.0),)
    with pytest.raises(DegeneratePairError, match="degenerate pair"):
        exp_sum_from_pair([1, 2], [2, 1])


def test_zero_upper_bound_examples():
    assert zero_upper_bound(ExpSum(((-1, 2 * LOG2), (2, LOG2)))) == pytest.approx(1.0, abs=2e-6)
    assert zero_upper_bound(ExpSum(((1, 2),))) == 0.0
    assert zero_upper_bound(ExpSum(((1, 3), (-1, 1)))) == pytest.approx(0.0, abs=2e-6)


def test_zero_examples():
    F = ExpSum(((-1, 2 * LOG2), (2, LOG2)))
    assert list(exp_sum_zeros(F, 0.1)) == pytest.approx([1.0], abs=1e-9)
    assert list(exp_sum_zeros(ExpSum(((1, 3), (-1, 1))), 0.1)) == []
    scan = exp_sum_zeros(ExpSum(((1, 4), (-3, 2), (1, 1))), 0.01)
    assert list(scan) == pytest.approx([QUAD_ZERO], abs=1e-9)
    assert scan.descartes_bound == 2


def test_zero_argument_checks():
    F = ExpSum(((1, 3), (-1, 1)))
    with pytest.raises(ValueError):
        exp_sum_zeros(F, 0.0)
    with pytest.raises(ValueError):
        exp_sum_zeros(F, 0.1, tol=1e-14)


def test_close_zero_pair_found():
    # zeros at t = 1 and t = 1.001 from F(t) = (e^{a} - e^{b})-style construction
    # 4^t - (2^1 + 2^1.001) 2^t + 2^2.001 has zeros where 2^t = 2 and 2^t = 2^1.001
    c1, c2 = 2.0, 2.0**1.001
    F = ExpSum(((1, 4), (-(c1 + c2), 2), (c1 * c2, 1)))
    zs = list(exp_sum_zeros(F, 0.1))
    assert zs == pytest.approx([1.0, 1.001], abs=1e-9)


def test_tangency_flagged_not_counted():
    # (2^t - 2)^2 = 4^t - 4 * 2^t + 4 touches zero at t = 1
    scan = exp_sum_zeros(ExpSum(((1, 4), (-4, 2), (4, 1))), 0.1)
    assert scan.zeros == ()
    assert len(scan.tangencies) == 1 and scan.tangencies[0] == pytest.approx(1.0, abs=1e-4)


def test_intersection_examples():
    assert intersection_points([LOG4], [LOG2, LOG2], 0.1) == pytest.approx([1.0], abs=1e-9)
    assert intersection_points([1, 1], [1, 1], 0.1) == []
    assert intersection_points([2], [1, 1], 0.1) == pytest.approx([1.0], abs=1e-9)


def test_vector_set_dedup():
    X = VectorSet([[1, 2], [2, 1], [2, 1, 0], [3]])
    assert len(X) == 2
    assert X.index([1, 2]) == 0
    with pytest.raises(ValueError):
        X.index([5])


def test_asymptotic_min_examples():
    assert asymptotic_min([[LOG4], [LOG2, LOG2]]) == HeightVector([LOG2, LOG2])
    assert asymptotic_min([[3, 1], [2, 2]]) == HeightVector([2, 2])
    assert asymptotic_min([[2, 1], [2, 0.5, 0.5]]) == HeightVector([2, 0.5, 0.5])
    assert asymptotic_min([[2, 1], [2, 1, 1]], return_rounds=True) == (HeightVector([2, 1]), 3)
    with pytest.raises(ValueError):
        asymptotic_min([])


def test_envelope_unit_case():
    env = lower_envelope([[LOG4], [LOG2, LOG2]], 0.25, 4)
    assert env.exceptional == pytest.approx((1.0,), abs=1e-9)
    assert [p.vector for p in env.pieces] == [HeightVector([LOG4]), HeightVector([LOG2, LOG2])]
    assert env.pieces[0].t_lo == 0.25 and env.pieces[-1].t_hi == 4


def test_envelope_singleton_and_dominated():
    env = lower_envelope([[5]], 0.25, 10)
    assert len(env.pieces) == 1 and env.exceptional == ()
    env = lower_envelope([[LOG4], [LOG2, LOG2], [10]], 0.25, INF)
    assert env.exceptional == pytest.approx((1.0,), abs=1e-9)
    assert env.pieces[-1].t_hi == INF
    assert env.pieces[-1].vector == HeightVector([LOG2, LOG2])
    assert env.asymptotic == HeightVector([LOG2, LOG2])


def test_envelope_argument_checks():
    with pytest.raises(ValueError):
        lower_envelope([], 0.25, 4)
    with pytest.raises(ValueError):
        lower_envelope([[1]], 2, 1)


def test_envelope_half_open_pieces():
    env = lower_envelope([[LOG4], [LOG2, LOG2]], 0.25, 4)
    b = env.exceptional[0]
    assert env.piece_index(b) == 1
    assert env.piece_index(b - 1e-6) == 0


def test_round_trip_dict():
    env = lower_envelope([[LOG4], [LOG2, LOG2], [1.0, 0.9, 0.3]], 0.25, INF)
    data = json.loads(json.dumps(env.to_dict()))
    assert data["pieces"][-1]["t_hi"] is None
    again = envelope_from_dict(data)
    assert again.breakpoints == env.breakpoints
    assert again.exceptional == env.exceptional


def test_determinism():
    X = [[1.3, 0.2], [1.0, 0.9], [1.1, 0.5, 0.5]]
    a = lower_envelope(X, 0.25, INF)
    b = lower_envelope(X, 0.25, INF)
    assert a.breakpoints == b.breakpoints and a.exceptional == b.exceptional


pool = [0.3, 0.5, LOG2, 0.9, 1.0, LOG2 * 1.5, 1.2, 1.5, 2.0]
vec = st.lists(st.sampled_from(pool), min_size=1, max_size=4)


@settings(max_examples=60, deadline=None)
@given(st.lists(vec, min_size=1, max_size=5))
def test_envelope_matches_direct_minimum(X):
    env = lower_envelope(X, 0.25, INF)
    rng = np.random.default_rng(len(X))
    for t in np.exp(rng.uniform(math.log(0.25), math.log(40.0), 200)):
        direct = min_norm(X, t)
        assert abs(env.value(t) - direct) <= 1e-10 * (1 + direct)
    inter = set()
    members = env.members.members
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            inter.update(intersection_points(members[i], members[j], 0.25))
    for e in env.exceptional:
        assert any(abs(e - z) <= 1e-9 for z in inter)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 5).filter(bool), st.sampled_from([0.2, 0.5, 1, 1.5, 2, 3, 4.5])),
                min_size=1, max_size=5))
def test_descartes_and_leading_sign(terms):
    F = ExpSum.from_terms(terms)
    if not F.terms:
        return
    scan = exp_sum_zeros(F, 0.05)
    assert len(scan) <= F.sign_changes()
    if len(F) > 1:
        t = zero_upper_bound(F) + 1
        assert np.sign(F.normalized(t)) == np.sign(F.terms[0][0])


def test_asymptotic_is_final_piece_random():
    rng = random.Random(5)
    for _ in range(200):
        X = [[rng.choice(pool) for _ in range(rng.randint(1, 4))] for _ in range(rng.randint(1, 5))]
        env = lower_envelope(X, 0.25, INF)
        M = asymptotic_min(X)
        assert same_or_equal(env.pieces[-1].vector, M)


def same_or_equal(a, b):
    return HeightVector(a) == HeightVector(b)
