"""L_t norms of height vectors and executable height axioms.

All heights are natural-log quantities (``log 2``, not ``1`` bit).
The exponent ``t`` is a positive float; ``INFINITY`` (``math.inf``) selects
the max norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

INFINITY = math.inf

#: absolute tolerance when matching entries of two height vectors
ENTRY_ATOL = 1e-12


def check_t(t: float) -> float:
    """Validate an exponent: a positive real or ``INFINITY``."""
    try:
        t = float(t)
    except (TypeError, ValueError):
        raise ValueError(f"t must be a positive real or inf, got {t!r}") from None
    if math.isnan(t) or t <= 0:
        raise ValueError(f"t must be a positive real or inf, got {t!r}")
    return t


class HeightVector:
    """A finitely supported point ``(x_1, x_2, ...)`` with ``x_1 >= x_2 >= ... >= 0``.

    Entries are sorted descending on construction and exact zeros are dropped,
    so ``HeightVector([1, 0, 2]) == HeightVector([2, 1])``.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[float] = ()):
        vals = []
        for x in entries:
            x = float(x)
            if not math.isfinite(x) or x < 0:
                raise ValueError(f"height entries must be finite and >= 0, got {x!r}")
            if x > 0:
                vals.append(x)
        vals.sort(reverse=True)
        self._entries = tuple(vals)

    @property
    def entries(self) -> tuple[float, ...]:
        return self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __getitem__(self, i):
        return self._entries[i]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, HeightVector):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        return f"HeightVector({list(self._entries)!r})"

    def coord(self, k: int) -> float:
        """``k``-th coordinate (0-based), zero past the support."""
        return self._entries[k] if k < len(self._entries) else 0.0

    def norm(self, t: float) -> float:
        return lt_norm(self, t)

    def tolist(self) -> list[float]:
        return list(self._entries)


def as_height_vector(x: HeightVector | Iterable[float]) -> HeightVector:
    return x if isinstance(x, HeightVector) else HeightVector(x)


def lt_norm(x: HeightVector | Iterable[float], t: float) -> float:
    """The L_t norm ``(sum x_n^t)^(1/t)``; the max entry when ``t`` is infinite.

    >>> round(lt_norm([math.log(2), math.log(2)], 1), 6)
    1.386294
    """
    x = as_height_vector(x)
    t = check_t(t)
    if not x:
        return 0.0
    top = x[0]
    if math.isinf(t):
        return top
    # factor out the max so x^t can neither overflow nor underflow
    if t > 700.0 / math.log(top + 2.0) or t * abs(math.log(top)) > 700.0:
        s = math.fsum((v / top) ** t for v in x)
        return top * s ** (1.0 / t)
    return math.fsum(v**t for v in x) ** (1.0 / t)


def same_norm_function(
    x: HeightVector | Iterable[float],
    y: HeightVector | Iterable[float],
    atol: float = ENTRY_ATOL,
) -> bool:
    """True iff ``t -> ||x||_t`` and ``t -> ||y||_t`` are the same function.

    Distinct exponentials are linearly independent, so the two functions agree
    everywhere exactly when the multisets of nonzero entries coincide.
    """
    x = as_height_vector(x)
    y = as_height_vector(y)
    if len(x) != len(y):
        return False
    return all(abs(a - b) <= atol for a, b in zip(x, y))


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    element: Any
    detail: str


def check_height_axioms(
    phi: Callable[[Any], float],
    sample: Iterable[Any],
    identity: Any = None,
    inverse: Callable[[Any], Any] | None = None,
    tol: float = ENTRY_ATOL,
) -> list[AxiomViolation]:
    """Check ``phi(e) == 0`` and ``phi(a) == phi(a^-1)`` on a sample.

    ``inverse`` defaults to calling ``a.inverse()``; ``identity`` defaults to
    the sample element whose inverse equals itself and that satisfies
    ``a.is_identity`` when that attribute exists. Returns the list of
    violations (empty when both axioms hold on the sample).
    """
    if inverse is None:
        inverse = lambda a: a.inverse()  # noqa: E731
    sample = list(sample)
    report: list[AxiomViolation] = []

    if identity is None:
        ids = [a for a in sample if getattr(a, "is_identity", False)]
        if not ids:
            raise ValueError("sample must contain the group identity")
        identity = ids[0]
    v = phi(identity)
    if abs(v) > tol:
        report.append(AxiomViolation("identity", identity, f"phi(e) = {v!r}"))

    for a in sample:
        lhs, rhs = phi(a), phi(inverse(a))
        if lhs < 0:
            report.append(AxiomViolation("nonnegative", a, f"phi = {lhs!r}"))
        if abs(lhs - rhs) > tol * max(1.0, abs(lhs)):
            report.append(
                AxiomViolation("inversion", a, f"phi(a) = {lhs!r}, phi(a^-1) = {rhs!r}")
            )
    return report


def check_t_triangle(
    values: Iterable[Sequence[float]], t: float, tol: float = ENTRY_ATOL
) -> bool:
    """True iff every ``(phi(ab), phi(a), phi(b))`` obeys the t-triangle inequality."""
    t = check_t(t)
    for ab, a, b in values:
        rhs = max(a, b) if math.isinf(t) else lt_norm((a, b), t)
        if ab > rhs + tol:
            return False
    return True
