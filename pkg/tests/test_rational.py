import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import LOG2, LOG3, rational_height
from metric_heights.primes import MAX_INPUT, divisors, factor_counts, factor_integer, is_prime
from metric_heights.rational import (
    FactoredRational,
    Factorization,
    as_rational,
    parse_rational,
    product,
    weil_height,
)


def _sieve(n):
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def test_factor_examples():
    assert factor_integer(12) == [2, 2, 3]
    assert factor_integer(1) == []
    assert factor_integer(97) == [97]


@pytest.mark.parametrize("bad", [0, -4])
def test_factor_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        factor_integer(bad)


def test_factor_rejects_oversized_and_non_int():
    with pytest.raises(ValueError):
        factor_integer(MAX_INPUT + 1)
    with pytest.raises(TypeError):
        factor_integer(2.0)


def test_factor_exhaustive_to_one_million():
    N = 10**6
    prime = _sieve(N)
    for n in range(1, N + 1):
        fs = factor_integer(n)
        assert math.prod(fs) == n
        assert all(prime[p] for p in fs)


@pytest.mark.parametrize(
    "n",
    [
        2**61 - 1,
        (2**31 - 1) * (2**31 + 11),
        999_983 * 1_000_003,
        1_000_003**2,
        2**62,
        MAX_INPUT,
        600851475143,
        3 * 5 * 7 * 11 * 13 * 17 * 19 * 23 * 29 * 31 * 37 * 41 * 43 * 47,
    ],
)
def test_factor_large(n):
    fs = factor_integer(n)
    assert math.prod(fs) == n
    assert fs == sorted(fs)
    assert all(is_prime(p) for p in fs)


def test_is_prime_matches_sieve():
    prime = _sieve(20000)
    assert all(is_prime(n) == bool(prime[n]) for n in range(20000))
    assert is_prime(2**61 - 1) and not is_prime(3215031751)  # strong pseudoprime to 2, 3, 5, 7


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(-12) == divisors(12)
    assert divisors(1) == [1]


def test_parse_examples():
    q = parse_rational("12")
    assert q.sign == 1 and q.factors == {2: 2, 3: 1}
    q = parse_rational("-3/2")
    assert q.sign == -1 and q.factors == {3: 1, 2: -1}
    assert parse_rational("1").is_identity
    assert parse_rational(" 6 / -4 ").to_fraction() == Fraction(-3, 2)


@pytest.mark.parametrize("text", ["0", "0/5", "1/0", "abc", "1.5", "", str(2**63), f"1/{2**64}"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_parse_zero_message():
    with pytest.raises(ValueError, match="zero is not a group element"):
        parse_rational("0")


def test_constructor_validation():
    with pytest.raises(ValueError):
        FactoredRational(1, {4: 1})
    with pytest.raises(ValueError):
        FactoredRational(0, {})
    assert FactoredRational(1, {2: 0}) == FactoredRational.identity()


def test_product_examples():
    two = FactoredRational(1, {2: 1})
    six = FactoredRational(1, {2: 1, 3: 1})
    assert product([two, six]) == FactoredRational(1, {2: 2, 3: 1})
    x = parse_rational("-45/14")
    assert product([x, x.inverse()]).is_identity
    assert product([]) == FactoredRational.identity()


def test_factorization_checks_product():
    x = parse_rational("12")
    Factorization((parse_rational("3"), parse_rational("4")), x)
    with pytest.raises(ValueError):
        Factorization((parse_rational("3"), parse_rational("2")), x)


def test_torsion():
    assert parse_rational("-1").is_torsion
    assert parse_rational("1").is_torsion
    assert not parse_rational("2").is_torsion


def test_weil_height_examples():
    assert weil_height(parse_rational("2")) == pytest.approx(LOG2, abs=1e-15)
    assert weil_height(parse_rational("-1")) == 0.0
    assert weil_height(parse_rational("3/2")) == pytest.approx(LOG3, abs=1e-15)


def test_weil_height_huge_no_overflow():
    q = FactoredRational(1, {2: 5000, 3: -2000})
    assert weil_height(q) == pytest.approx(5000 * math.log(2))


coords = st.integers(min_value=1, max_value=10**6)


@settings(max_examples=500, deadline=None)
@given(coords, coords, st.booleans())
def test_round_trip(p, q, neg):
    f = Fraction(-p if neg else p, q)
    text = f"{f.numerator}/{f.denominator}"
    r = parse_rational(text)
    assert r.to_fraction() == f
    assert r.numerator == f.numerator and r.denominator == f.denominator
    assert parse_rational(str(r)) == r


@settings(max_examples=300, deadline=None)
@given(coords, coords)
def test_height_matches_oracle(p, q):
    assert weil_height(as_rational(Fraction(p, q))) == pytest.approx(
        rational_height(Fraction(p, q)), abs=1e-12
    )


def test_height_inversion_symmetric_random():
    rng = random.Random(7)
    for _ in range(1000):
        q = as_rational(Fraction(rng.choice([-1, 1]) * rng.randint(1, 10**6), rng.randint(1, 10**6)))
        assert weil_height(q) == weil_height(q.inverse())


@settings(max_examples=300, deadline=None)
@given(coords, coords, st.integers(min_value=-5, max_value=5))
def test_height_of_powers(p, q, n):
    x = as_rational(Fraction(p, q))
    assert abs(weil_height(x**n) - abs(n) * weil_height(x)) <= 1e-12 * max(1.0, abs(n) * weil_height(x))


def test_group_ops():
    a, b = parse_rational("6/5"), parse_rational("-10/3")
    assert (a * b).to_fraction() == Fraction(-4)
    assert (a / b).to_fraction() == Fraction(-9, 25)
    assert (-a).to_fraction() == Fraction(-6, 5)
    assert (b**-2).to_fraction() == Fraction(9, 100)
    assert a.exponent_vector([2, 3, 5, 7]) == (1, 1, -1, 0)
    assert factor_counts(360) == {2: 3, 3: 2, 5: 1}
