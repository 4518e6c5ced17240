"""The multiplicative group of nonzero rationals in factored form."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .primes import MAX_INPUT, factor_counts, is_prime

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


@dataclass(frozen=True, init=False)
class FactoredRational:
    """``sign * prod(p**e)`` with every ``p`` prime and every ``e`` nonzero."""

    sign: int
    _factors: tuple[tuple[int, int], ...]

    def __init__(self, sign: int = 1, factors: Mapping[int, int] | None = None):
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign!r}")
        items = []
        for p, e in (factors or {}).items():
            p, e = int(p), int(e)
            if e == 0:
                continue
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            items.append((p, e))
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "_factors", tuple(sorted(items)))

    @classmethod
    def identity(cls) -> FactoredRational:
        return cls()

    @classmethod
    def from_int(cls, n: int) -> FactoredRational:
        n = int(n)
        if n == 0:
            raise ValueError("zero is not a group element")
        return cls(1 if n > 0 else -1, factor_counts(abs(n)))

    @classmethod
    def from_fraction(cls, q: Fraction | int) -> FactoredRational:
        q = Fraction(q)
        if q == 0:
            raise ValueError("zero is not a group element")
        num = factor_counts(abs(q.numerator))
        for p, e in factor_counts(q.denominator).items():
            num[p] = num.get(p, 0) - e
        return cls(1 if q > 0 else -1, num)

    @property
    def factors(self) -> dict[int, int]:
        return dict(self._factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self._factors)

    @property
    def is_identity(self) -> bool:
        return self.sign == 1 and not self._factors

    @property
    def is_torsion(self) -> bool:
        """True for the roots of unity in Q, namely +1 and -1."""
        return not self._factors

    @property
    def numerator(self) -> int:
        n = self.sign
        for p, e in self._factors:
            if e > 0:
                n *= p**e
        return n

    @property
    def denominator(self) -> int:
        d = 1
        for p, e in self._factors:
            if e < 0:
                d *= p ** (-e)
        return d

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def exponent(self, p: int) -> int:
        for q, e in self._factors:
            if q == p:
                return e
        return 0

    def exponent_vector(self, primes: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.exponent(p) for p in primes)

    def inverse(self) -> FactoredRational:
        return FactoredRational(self.sign, {p: -e for p, e in self._factors})

    def __mul__(self, other: FactoredRational) -> FactoredRational:
        if not isinstance(other, FactoredRational):
            return NotImplemented
        out = dict(self._factors)
        for p, e in other._factors:
            out[p] = out.get(p, 0) + e
        return FactoredRational(self.sign * other.sign, out)

    def __truediv__(self, other: FactoredRational) -> FactoredRational:
        if not isinstance(other, FactoredRational):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int) -> FactoredRational:
        n = int(n)
        sign = self.sign if n % 2 else 1
        return FactoredRational(sign, {p: e * n for p, e in self._factors})

    def __neg__(self) -> FactoredRational:
        return FactoredRational(-self.sign, dict(self._factors))

    def __str__(self) -> str:
        d = self.denominator
        return str(self.numerator) if d == 1 else f"{self.numerator}/{d}"

    def __repr__(self) -> str:
        return f"FactoredRational({self})"


@dataclass(frozen=True)
class Factorization:
    """Parts whose product is exactly ``target``."""

    parts: tuple[FactoredRational, ...]
    target: FactoredRational

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if product(self.parts) != self.target:
            raise ValueError(f"parts do not multiply to {self.target}")

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return " * ".join(str(p) for p in self.parts) if self.parts else "1"


def parse_rational(text: str) -> FactoredRational:
    """Parse ``"n"``, ``"-n"`` or ``"p/q"`` into lowest-terms factored form.

    >>> parse_rational("-3/2").factors
    {2: -1, 3: 1}
    """
    m = _RATIONAL_RE.match(str(text))
    if not m:
        raise ValueError(f"cannot parse {text!r} as a rational")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    if num == 0:
        raise ValueError("zero is not a group element")
    if abs(num) > MAX_INPUT or abs(den) > MAX_INPUT:
        raise ValueError(f"{text!r} exceeds the supported magnitude 2**63 - 1")
    return FactoredRational.from_fraction(Fraction(num, den))


def as_rational(x) -> FactoredRational:
    if isinstance(x, FactoredRational):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, (int, Fraction)):
        return FactoredRational.from_fraction(Fraction(x))
    raise TypeError(f"cannot interpret {x!r} as a nonzero rational")


def product(parts: Iterable[FactoredRational]) -> FactoredRational:
    """Exact product; the empty product is the identity."""
    sign = 1
    out: dict[int, int] = {}
    for q in parts:
        sign *= q.sign
        for p, e in q._factors:
            out[p] = out.get(p, 0) + e
    return FactoredRational(sign, out)


def weil_height(q: FactoredRational) -> float:
    """``log max(|num|, |den|)`` of ``q`` in lowest terms.

    This is also the Mahler measure of ``q``, since rationals have degree 1.
    """
    up = math.fsum(e * math.log(p) for p, e in q._factors if e > 0)
    down = math.fsum(-e * math.log(p) for p, e in q._factors if e < 0)
    return max(up, down)
