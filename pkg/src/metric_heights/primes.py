"""Integer factorization for inputs below 2**63.

Small inputs use a smallest-prime-factor table, larger ones trial division by
primes below 10**6 followed by Pollard rho (Brent's variant) with a
deterministic Miller-Rabin test.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

import numpy as np

MAX_INPUT = 2**63 - 1
TRIAL_LIMIT = 10**6

# deterministic for n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=1)
def _spf_table() -> np.ndarray:
    spf = np.zeros(TRIAL_LIMIT + 1, dtype=np.int32)
    for p in range(2, isqrt(TRIAL_LIMIT) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.arange(TRIAL_LIMIT + 1, dtype=np.int32)
    mask = spf == 0
    spf[mask] = idx[mask]
    return spf


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    spf = _spf_table()
    idx = np.nonzero(spf[2:] == np.arange(2, TRIAL_LIMIT + 1))[0] + 2
    return tuple(int(p) for p in idx)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= TRIAL_LIMIT:
        return int(_spf_table()[n]) == n
    for p in _MR_BASES:
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    """A nontrivial factor of the odd composite ``n``."""
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed on {n}")


def _split(n: int, out: list[int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out.append(n)
        return
    d = _brent(n)
    _split(d, out)
    _split(n // d, out)


def factor_integer(n: int) -> list[int]:
    """Prime factors of ``n`` with multiplicity, ascending.

    >>> factor_integer(12)
    [2, 2, 3]
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"expected an integer, got {type(n).__name__}")
    n = int(n)
    if n <= 0:
        raise ValueError(f"factor_integer needs a positive integer, got {n}")
    if n > MAX_INPUT:
        raise ValueError(f"{n} exceeds the supported magnitude 2**63 - 1")

    out: list[int] = []
    if n <= TRIAL_LIMIT:
        spf = _spf_table()
        while n > 1:
            p = int(spf[n])
            out.append(p)
            n //= p
        return out

    for p in _small_primes():
        if p * p > n:
            break
        while n % p == 0:
            out.append(p)
            n //= p
    if n > 1:
        big: list[int] = []
        _split(n, big)
        out.extend(sorted(big))
    return out


def factor_counts(n: int) -> dict[int, int]:
    counts: dict[int, int] = {}
    for p in factor_integer(n):
        counts[p] = counts.get(p, 0) + 1
    return counts


def divisors(n: int) -> list[int]:
    """Positive divisors of ``|n|``, ascending."""
    divs = [1]
    for p, e in factor_counts(abs(n)).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)
