import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import LOG2, LOG3, LOG12, TWELVE_T2, integer_tmetric
from metric_heights.norms import lt_norm
from metric_heights.primes import factor_integer
from metric_heights.rational import FactoredRational, parse_rational, product, weil_height
from metric_heights.search import (
    CandidateSet,
    SearchBudgetExceeded,
    SpanError,
    brute_force_tmetric,
    collapse_bound,
    divisor_candidate_set,
    node_budget,
    rational_divisor_candidate_set,
    restricted_tmetric,
    search_bound,
    tmetric_profile,
)

INF = math.inf
Q = parse_rational


def _strs(S):
    return {str(e) for e in S}


def test_divisor_candidate_sets():
    S = divisor_candidate_set(12)
    for d in (2, 3, 4, 6, 12):
        assert {f"{d}", f"-{d}", f"1/{d}", f"-1/{d}"} <= _strs(S)
    assert {"1", "-1"} <= _strs(S)
    assert len(S) == 22
    assert _strs(divisor_candidate_set(1)) == {"1", "-1"}
    assert _strs(divisor_candidate_set(97)) == {"1", "-1", "97", "-97", "1/97", "-1/97"}
    assert S.delta == pytest.approx(LOG2)
    with pytest.raises(ValueError):
        divisor_candidate_set(0)


def test_candidate_set_closure():
    S = CandidateSet([Q("2"), Q("3/5")])
    assert Q("1/2") in S and Q("5/3") in S and Q("1") in S
    assert not S.has_minus_one
    with pytest.raises(ValueError):
        CandidateSet([Q("2")], close=False)
    assert CandidateSet([Q("1")]).delta == 0.0


def test_search_bound_examples():
    S = divisor_candidate_set(12)
    assert search_bound(LOG12, S, 2) == 12
    assert search_bound(0.0, S, 3) == 0
    assert search_bound(LOG2, LOG2, 1) == 1
    with pytest.raises(ValueError, match="unbounded part count"):
        search_bound(1.0, CandidateSet([Q("-1")]), 2)


def test_twelve():
    S = divisor_candidate_set(12)
    r = restricted_tmetric(12, S, 2)
    assert r.value == pytest.approx(TWELVE_T2, abs=1e-12)
    assert sorted(str(p) for p in r.witness.parts) == ["2", "2", "3"]
    assert r.label == "restricted" and r.attained
    r1 = restricted_tmetric(12, S, 1)
    assert r1.value == pytest.approx(LOG12, abs=1e-12)
    assert [str(p) for p in r1.witness.parts] == ["12"]
    assert restricted_tmetric(12, S, INF).value == pytest.approx(LOG3, abs=1e-15)


def test_identity_target():
    for t in (0.5, 2, INF):
        r = restricted_tmetric(1, divisor_candidate_set(30), t)
        assert r.value == 0.0 and len(r.witness) == 0


def test_tie_break_prefers_fewer_parts():
    S = CandidateSet([Q("-1"), Q("2"), Q("4")])
    r = restricted_tmetric(4, S, 1)
    assert r.value == pytest.approx(2 * LOG2)
    assert [str(p) for p in r.witness.parts] == ["4"]
    r = restricted_tmetric(4, S, INF)
    assert r.value == pytest.approx(LOG2)
    assert [str(p) for p in r.witness.parts] == ["2", "2"]


def test_brute_force_examples():
    S = divisor_candidate_set(12)
    assert brute_force_tmetric(12, S, 2, 5).value == pytest.approx(TWELVE_T2, abs=1e-12)
    assert brute_force_tmetric(1, S, 2, 3).value == 0.0
    r = brute_force_tmetric(4, CandidateSet([Q("-1"), Q("2"), Q("4")]), INF, 4)
    assert r.value == pytest.approx(LOG2)
    assert [str(p) for p in r.witness.parts] == ["2", "2"]


def test_brute_force_budget():
    with pytest.raises(ValueError):
        brute_force_tmetric(720720, divisor_candidate_set(720720), 2, 40)


def test_span_error():
    with pytest.raises(SpanError, match="does not span"):
        restricted_tmetric(5, CandidateSet([Q("2"), Q("3")]), 1)
    # even exponent lattice cannot reach 2
    with pytest.raises(SpanError):
        restricted_tmetric(2, CandidateSet([Q("4")]), 1)
    # sign cannot be fixed without -1 or a negative part
    with pytest.raises(SpanError):
        restricted_tmetric(-2, CandidateSet([Q("2")]), 1)


def test_sign_without_minus_one():
    S = CandidateSet([Q("-2"), Q("3"), Q("6")])
    r = restricted_tmetric(-3, S, 1)
    assert product(r.witness.parts) == Q("-3")
    assert all(not p.is_torsion for p in r.witness.parts)
    assert [str(p) for p in r.witness.parts] == ["6", "-1/2"]
    assert r.value == pytest.approx(brute_force_tmetric(-3, S, 1, 4).value, abs=1e-12)


def test_rational_targets():
    q = Q("8/9")
    S = rational_divisor_candidate_set(q)
    r = restricted_tmetric(q, S, 2)
    assert product(r.witness.parts) == q
    assert r.value == pytest.approx(brute_force_tmetric(q, S, 2, 6).value, abs=1e-12)
    # 8/9 = 2/3 * 2/3 * 2
    assert r.value == pytest.approx(math.sqrt(2 * LOG3**2 + LOG2**2), abs=1e-12)
    assert q in S
    assert restricted_tmetric(q, S, 1).value == pytest.approx(weil_height(q), abs=1e-12)


def test_budget_exceeded_carries_incumbent(monkeypatch):
    S = divisor_candidate_set(360)
    with pytest.raises(SearchBudgetExceeded) as info:
        restricted_tmetric(360, S, 8, budget=10)
    inc = info.value.incumbent
    assert inc is not None and product(inc.witness.parts) == Q("360")
    monkeypatch.setenv("METRIC_HEIGHT_BUDGET", "7")
    assert node_budget() == 7
    with pytest.raises(SearchBudgetExceeded):
        restricted_tmetric(360, S, 8)
    monkeypatch.setenv("METRIC_HEIGHT_BUDGET", "lots")
    with pytest.raises(ValueError):
        node_budget()


def test_profile_examples():
    S = divisor_candidate_set(12)
    prof = tmetric_profile(12, S, [1, 2, INF])
    assert prof.values == pytest.approx([LOG12, TWELVE_T2, LOG3], abs=1e-12)
    assert [r.witness_id for r in prof.rows] == [0, 1, 1]
    assert len(prof.witnesses) == 2
    assert tmetric_profile(1, S, [0.5, 3]).values == [0.0, 0.0]
    two = tmetric_profile(2, CandidateSet([Q("-1"), Q("2")]), [0.5, 1, 2])
    assert two.values == pytest.approx([LOG2] * 3)
    with pytest.raises(ValueError):
        tmetric_profile(12, S, [2, 1])
    with pytest.raises(ValueError):
        tmetric_profile(12, S, [])


def test_collapse_bound():
    assert collapse_bound(LOG2, 4, 2) == pytest.approx(LOG2 / 2)
    assert collapse_bound(LOG2, 1, 2) == pytest.approx(LOG2)
    assert collapse_bound(0.0, 9, 3) == 0.0
    for bad_t in (1, 0.5, INF):
        with pytest.raises(ValueError, match="t > 1"):
            collapse_bound(LOG2, 4, bad_t)


@pytest.mark.parametrize("n", [2, 12, 30, 64, 96, 97, 360, 720])
@pytest.mark.parametrize("t", [0.5, 1, 1.5, 2, 3, INF])
def test_matches_integer_partition_oracle(n, t):
    # divisor parts suffice: parts with denominators never help for integer targets
    assert restricted_tmetric(n, divisor_candidate_set(n), t).value == pytest.approx(
        integer_tmetric(n, t), abs=1e-10
    )


@pytest.mark.parametrize("n", range(2, 61))
def test_t_one_is_log_n(n):
    r = restricted_tmetric(n, divisor_candidate_set(n), 1)
    assert r.value == pytest.approx(math.log(n), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 400), st.sampled_from([0.3, 0.7, 1.0, 1.7, 2.5, 6.0, INF]))
def test_witness_and_bounds(n, t):
    S = divisor_candidate_set(n)
    r = restricted_tmetric(n, S, t)
    assert product(r.witness.parts) == FactoredRational.from_int(n)
    assert r.value == pytest.approx(lt_norm([weil_height(p) for p in r.witness.parts], t), abs=1e-12)
    assert r.value <= math.log(n) + 1e-12
    inv = restricted_tmetric(FactoredRational.from_int(n).inverse(), S, t)
    assert inv.value == pytest.approx(r.value, abs=1e-12)
    if not math.isinf(t):
        assert r.n_parts <= search_bound(math.log(n), S, t)
    assert r.n_parts <= len(factor_integer(n))


def test_t_triangle_sampled():
    rng = random.Random(11)
    S = divisor_candidate_set(360)
    divs = [d for d in range(1, 361) if 360 % d == 0]
    for _ in range(200):
        a, b = rng.choice(divs), rng.choice(divs)
        if 360 % (a * b):
            continue
        t = rng.choice([0.5, 1.0, 2.0, 3.0])
        va = restricted_tmetric(a, S, t).value
        vb = restricted_tmetric(b, S, t).value
        vab = restricted_tmetric(a * b, S, t).value
        assert vab**t <= va**t + vb**t + 1e-9


@pytest.mark.parametrize("n", [2, 6, 12, 30, 36, 48, 60])
@pytest.mark.parametrize("t", [0.5, 2, INF])
def test_matches_brute_force_with_extra_parts(n, t):
    S = divisor_candidate_set(n)
    k = len(factor_integer(n)) + 1
    assert restricted_tmetric(n, S, t).value == pytest.approx(brute_force_tmetric(n, S, t, k).value, abs=1e-10)
