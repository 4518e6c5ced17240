"""Mahler measure and Weil height of algebraic numbers from integer polynomials.

Roots come from Aberth-Ehrlich iteration seeded by companion-matrix
eigenvalues. Each root carries an inclusion radius: all zeros of a degree-n
polynomial lie in the union of the discs ``|z - z_i| <= n |W_i|`` where
``W_i`` is the Weierstrass correction, and a connected cluster of m discs holds
exactly m zeros. When double precision cannot meet the requested tolerance the
roots are re-polished in mpmath.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from .primes import divisors, factor_counts

DEFAULT_TOL = 1e-12
MIN_TOL = 1e-14
_EPS = np.finfo(float).eps
# factor screen for degrees 2..4 enumerates root subsets; skip above this
_SCREEN_MAX_DEGREE = 24


class ConvergenceError(ArithmeticError):
    """Root refinement did not reach the requested tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (best residual {residual:.3g})")
        self.residual = residual


@dataclass(frozen=True)
class IntPolynomial:
    """Integer coefficients in ascending degree order, ``coeffs[-1] != 0``."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        if any(c != f for c, f in zip(cs, self.coeffs)):
            raise ValueError("coefficients must be integers")
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        if len(cs) < 2:
            raise ValueError("polynomial must have degree >= 1")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def parse(cls, text: str) -> IntPolynomial:
        """``"-1,-1,1"`` is ``x^2 - x - 1``."""
        try:
            cs = [int(tok) for tok in str(text).replace(" ", "").split(",") if tok != ""]
        except ValueError:
            raise ValueError(f"cannot parse {text!r} as integer coefficients") from None
        return cls(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def reversed(self) -> IntPolynomial:
        """``x^deg p(1/x)``: roots map to their inverses."""
        cs = list(self.coeffs[::-1])
        while cs and cs[-1] == 0:
            cs.pop()
        return IntPolynomial(tuple(cs))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coeffs)


# -- exact polynomial arithmetic over Q (ascending Fraction lists) -----------


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _divmod(a, b):
    a = [Fraction(c) for c in a]
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a = _trim(a)
    return _trim(q), a


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a]


def _deriv(a):
    return _trim([i * c for i, c in enumerate(a)][1:])


def _sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def _primitive(a) -> tuple[int, ...]:
    den = 1
    for c in a:
        den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in a]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return tuple(ints)


def squarefree_decomposition(p: IntPolynomial) -> list[tuple[tuple[int, ...], int]]:
    """Yun's algorithm: ``[(primitive factor, multiplicity), ...]`` up to content."""
    f = [Fraction(c) for c in p.coeffs]
    out = []
    df = _deriv(f)
    a = _gcd(f, df)
    b, _ = _divmod(f, a)
    c, _ = _divmod(df, a)
    d = _sub(c, _deriv(b))
    i = 1
    while len(b) > 1:
        a = _gcd(b, d) if d else b
        if len(a) > 1:
            out.append((_primitive(a), i))
        b, _ = _divmod(b, a)
        c, _ = _divmod(d, a) if d else ([], [])
        d = _sub(c, _deriv(b))
        i += 1
    return out


def _divides(g: Sequence[int], f: Sequence[int]) -> bool:
    _, r = _divmod(list(f), list(g))
    return not r


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, ascending."""
    num = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    for d in divisors(n):
        if d < n:
            num, r = _divmod(num, [Fraction(c) for c in cyclotomic(d)])
            assert not r
    return tuple(int(c) for c in num)


def _totient(n: int) -> int:
    out = n
    for p in factor_counts(n):
        out = out // p * (p - 1)
    return out


def is_cyclotomic_product(p: IntPolynomial) -> bool:
    """Exact test: ``p`` is ``+-x^k`` times a product of cyclotomic polynomials."""
    cs = list(p.coeffs)
    while cs and cs[0] == 0:
        cs.pop(0)
    if abs(cs[-1]) != 1 or abs(cs[0]) != 1:
        return False
    f = [Fraction(c) for c in cs]
    deg = len(f) - 1
    n = 1
    # phi(n) >= sqrt(n/2), so every relevant order satisfies n <= 2 deg^2
    while len(f) > 1 and n <= 2 * deg * deg:
        if _totient(n) <= len(f) - 1:
            phi_n = [Fraction(c) for c in cyclotomic(n)]
            q, r = _divmod(f, phi_n)
            if not r:
                f = q
                continue
        n += 1
    return len(f) == 1


# -- roots --------------------------------------------------------------------


@dataclass(frozen=True)
class RootSet:
    """All complex roots with multiplicity, each with an absolute error bound."""

    roots: tuple[complex, ...]
    errors: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def max_error(self) -> float:
        return max(self.errors, default=0.0)


def _horner_bound(coeffs_desc_abs: np.ndarray, r: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(r)
    for c in coeffs_desc_abs:
        acc = acc * r + c
    return acc


def _inclusion_radii(cs: Sequence[int], z, *, mp: bool):
    """Per-root error bounds from Weierstrass discs, cluster-aware."""
    n = len(cs) - 1
    lead = cs[-1]
    if mp:
        radii = []
        eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 4)
        for i, zi in enumerate(z):
            val = mpmath.polyval(list(reversed(cs)), zi)
            scale = mpmath.polyval([abs(c) for c in reversed(cs)], abs(zi))
            den = lead
            for j, zj in enumerate(z):
                if j != i:
                    den *= zi - zj
            radii.append(float(n * (abs(val) + 4 * n * eps * scale) / abs(den)))
        zc = np.array([complex(v) for v in z])
        radii = np.array(radii) + 2 * _EPS * np.abs(zc)
    else:
        zc = np.asarray(z, dtype=complex)
        val = np.polyval(np.array(cs[::-1], dtype=float), zc)
        scale = _horner_bound(np.abs(np.array(cs[::-1], dtype=float)), np.abs(zc))
        diff = zc[:, None] - zc[None, :]
        np.fill_diagonal(diff, 1.0)
        den = np.abs(lead * np.prod(diff, axis=1))
        with np.errstate(divide="ignore", invalid="ignore"):
            radii = n * (np.abs(val) + 4 * n * _EPS * scale) / den
        radii = np.where(np.isfinite(radii), radii, np.inf)

    # clusters of overlapping discs: bound by the farthest reach in the cluster
    m = len(zc)
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(m):
        for j in range(i + 1, m):
            if abs(zc[i] - zc[j]) <= radii[i] + radii[j]:
                parent[find(i)] = find(j)
    errors = np.array(radii, dtype=float)
    for i in range(m):
        members = [j for j in range(m) if find(j) == find(i)]
        if len(members) > 1:
            errors[i] = max(abs(zc[i] - zc[j]) + radii[j] for j in members)
    return zc, errors


def _aberth_float(cs: Sequence[int], maxiter: int = 200) -> np.ndarray:
    desc = np.array(cs[::-1], dtype=float)
    z = np.roots(desc).astype(complex)
    ddesc = np.polyder(desc)
    n = len(z)
    if n == 1:
        return np.array([-cs[0] / cs[1]], dtype=complex)
    for _ in range(maxiter):
        p = np.polyval(desc, z)
        dp = np.polyval(ddesc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.all(np.abs(w) <= 4 * _EPS * np.maximum(1.0, np.abs(z))):
            break
    return z


def _aberth_mp(cs: Sequence[int], z0, dps: int, maxiter: int = 100):
    with mpmath.workdps(dps):
        desc = [mpmath.mpf(c) for c in reversed(cs)]
        ddesc = [c * (len(desc) - 1 - i) for i, c in enumerate(desc[:-1])]
        z = [mpmath.mpc(v) for v in z0]
        tiny = mpmath.mpf(10) ** (-dps + 5)
        for _ in range(maxiter):
            biggest = mpmath.mpf(0)
            new = list(z)
            for i, zi in enumerate(z):
                p = mpmath.polyval(desc, zi)
                dp = mpmath.polyval(ddesc, zi)
                if p == 0:
                    continue
                ratio = p / dp
                s = mpmath.fsum(1 / (zi - zj) for j, zj in enumerate(z) if j != i)
                w = ratio / (1 - ratio * s)
                new[i] = zi - w
                biggest = max(biggest, abs(w))
            z = new
            if biggest <= tiny:
                break
        return z


def _squarefree_roots(cs: tuple[int, ...], tol: float) -> tuple[np.ndarray, np.ndarray]:
    if len(cs) == 2:
        r = -cs[0] / cs[1]
        return np.array([r], dtype=complex), np.array([2 * _EPS * abs(r)])
    z = _aberth_float(cs)
    zc, err = _inclusion_radii(cs, z, mp=False)
    if np.all(err <= tol):
        return zc, err
    best = float(np.max(err))
    for dps in (40, 80):
        with mpmath.workdps(dps):
            zm = _aberth_mp(cs, z, dps)
            zc, err = _inclusion_radii(cs, zm, mp=True)
        best = min(best, float(np.max(err)))
        if np.all(err <= tol):
            return zc, err
    raise ConvergenceError("root refinement did not reach the tolerance", best)


def poly_roots(p: IntPolynomial | str | Sequence[int], tol: float = DEFAULT_TOL) -> RootSet:
    """All complex roots of ``p`` with multiplicity, each within ``tol`` of a true root."""
    p = as_polynomial(p)
    if tol < MIN_TOL:
        raise ValueError(f"tol must be >= {MIN_TOL}")
    roots: list[complex] = []
    errors: list[float] = []
    cs = list(p.coeffs)
    while cs[0] == 0:
        cs.pop(0)
        roots.append(0j)
        errors.append(0.0)
    if len(cs) > 1:
        for factor, mult in squarefree_decomposition(IntPolynomial(tuple(cs))):
            z, err = _squarefree_roots(factor, tol)
            order = np.lexsort((z.imag, z.real))
            for i in order:
                roots.extend([complex(z[i])] * mult)
                errors.extend([float(err[i])] * mult)
    return RootSet(tuple(roots), tuple(errors))


# -- measures -----------------------------------------------------------------


@dataclass(frozen=True)
class MahlerResult:
    """Logarithmic Mahler measure with its error estimate and screen warnings."""

    value: float
    error: float
    degree: int
    leading: int
    roots: RootSet
    warnings: tuple[str, ...] = ()

    @property
    def reducible(self) -> bool:
        return bool(self.warnings)

    @property
    def weil_height(self) -> float:
        return self.value / self.degree

    def __float__(self) -> float:
        return self.value


def _near_int(x: float, tol: float) -> int | None:
    k = round(x)
    return int(k) if abs(x - k) <= tol * max(1.0, abs(x)) else None


def reducibility_screen(p: IntPolynomial, roots: RootSet | None = None) -> list[str]:
    """Cheap evidence that ``p`` is not irreducible over Q (not a full test).

    Looks for a zero root, repeated factors, and integer factors of degree at
    most 4 whose roots are among the computed ones.
    """
    notes: list[str] = []
    n = p.degree
    if n == 1:
        return notes
    if p.coeffs[0] == 0:
        notes.append("divisible by x")
        return notes
    sqf = squarefree_decomposition(p)
    if any(m > 1 for _, m in sqf):
        notes.append("repeated factor")
        return notes
    if roots is None:
        roots = poly_roots(p)
    z = np.array(roots.roots)
    lead_divs = divisors(abs(p.leading))
    max_k = min(4, n // 2) if n <= _SCREEN_MAX_DEGREE else 1
    for k in range(1, max_k + 1):
        for idx in itertools.combinations(range(n), k):
            mon = np.poly(z[list(idx)])
            if np.max(np.abs(mon.imag)) > 1e-6 * max(1.0, np.max(np.abs(mon.real))):
                continue
            for c in lead_divs:
                ints = [_near_int(c * v, 1e-7) for v in mon.real]
                if any(v is None for v in ints):
                    continue
                g = ints[::-1]
                if _divides(g, p.coeffs):
                    notes.append(f"has a factor of degree {k}: {','.join(map(str, g))}")
                    return notes
    return notes


def mahler_measure(
    p: IntPolynomial | str | Sequence[int], tol: float = DEFAULT_TOL, screen: bool = True
) -> MahlerResult:
    """``log|lead| + sum(log+ |root|)`` for the polynomial as given.

    ``screen=True`` runs :func:`reducibility_screen` and records its findings
    in ``warnings``; the value is still computed for ``p`` itself.
    """
    p = as_polynomial(p)
    rs = poly_roots(p, tol)
    value = math.log(abs(p.leading))
    error = 0.0
    for z, r in zip(rs.roots, rs.errors):
        a = abs(z)
        value += max(0.0, math.log(a)) if a > 0 else 0.0
        if a + r > 1.0:
            error += r / max(1.0, a - r)
    if value < 1e-6 and is_cyclotomic_product(p):
        value, error = 0.0, 0.0
    warnings = tuple(reducibility_screen(p, rs)) if screen else ()
    return MahlerResult(value, error, p.degree, p.leading, rs, warnings)


def weil_height_algebraic(p: IntPolynomial | str | Sequence[int], tol: float = DEFAULT_TOL) -> float:
    """Weil height of a root of the minimal polynomial ``p``: Mahler measure over degree."""
    p = as_polynomial(p)
    return mahler_measure(p, tol, screen=False).value / p.degree


def as_polynomial(p) -> IntPolynomial:
    if isinstance(p, IntPolynomial):
        return p
    if isinstance(p, str):
        return IntPolynomial.parse(p)
    return IntPolynomial(tuple(p))
