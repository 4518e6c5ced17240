"""Lower envelopes of finitely many norm curves ``t -> ||x||_t``.

Two curves cross where ``F(t) = ||x||_t^t - ||y||_t^t`` vanishes. ``F`` is an
exponential sum ``sum a_k b_k^t``; beyond a computable bound it has the sign of
its leading term, so every crossing lies in a bounded window that a grid scan
plus bisection can search. The envelope is then assembled from the sorted
crossings, and its behaviour for large ``t`` is fixed by coordinatewise
filtering of the descending-sorted vectors.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .norms import ENTRY_ATOL, HeightVector, as_height_vector, check_t, lt_norm, same_norm_function

ZERO_TOL = 1e-12
MERGE_TOL = 1e-9
T_MARGIN = 1e-6
INITIAL_CELLS = 512
MAX_CELLS = 1 << 16
TANGENCY_TOL = 1e-9
# rounding floor of the normalized sum; shallower dips are not trusted as crossings
NOISE_FLOOR = 1e-14


class DegeneratePairError(ValueError):
    pass


@dataclass(frozen=True)
class ExpSum:
    """``F(t) = sum a_k b_k^t`` with bases strictly decreasing and no zero coefficients."""

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        terms = tuple((float(a), float(b)) for a, b in self.terms)
        for (_, b1), (_, b2) in zip(terms, terms[1:]):
            if not b1 > b2:
                raise ValueError("bases must be strictly decreasing")
        if any(a == 0 or b <= 0 for a, b in terms):
            raise ValueError("coefficients must be nonzero and bases positive")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, float]], atol: float = ENTRY_ATOL) -> ExpSum:
        """Sort by base, merge bases within ``atol`` and drop cancelled terms."""
        merged: list[list[float]] = []
        for a, b in sorted(terms, key=lambda ab: -ab[1]):
            if merged and abs(merged[-1][1] - b) <= atol:
                merged[-1][0] += a
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged if a != 0))

    def __len__(self) -> int:
        return len(self.terms)

    def __call__(self, t: float) -> float:
        return math.fsum(a * b**t for a, b in self.terms)

    def normalized(self, t):
        """``F(t)`` divided by ``sum |a_k| b_k^t``: same sign, no overflow."""
        t = np.asarray(t, dtype=float)
        b1 = self.terms[0][1]
        num = np.zeros_like(t)
        den = np.zeros_like(t)
        for a, b in self.terms:
            w = np.exp(t * math.log(b / b1))
            num = num + a * w
            den = den + abs(a) * w
        return num / den

    def sign_changes(self) -> int:
        """Sign changes of the coefficients in base order (bounds the real zeros)."""
        signs = [a > 0 for a, _ in self.terms]
        return sum(1 for s, u in zip(signs, signs[1:]) if s != u)


def exp_sum_from_pair(x, y, atol: float = ENTRY_ATOL) -> ExpSum:
    """``||x||_t^t - ||y||_t^t`` as a merged exponential sum."""
    x, y = as_height_vector(x), as_height_vector(y)
    if same_norm_function(x, y, atol):
        raise DegeneratePairError("degenerate pair: identical norm functions")
    terms = [(1.0, v) for v in x] + [(-1.0, v) for v in y]
    F = ExpSum.from_terms(terms, atol)
    if not F.terms:
        raise DegeneratePairError("degenerate pair: identical norm functions")
    return F


def zero_upper_bound(F: ExpSum) -> float:
    """A ``T*`` past which ``F`` keeps the sign of its leading coefficient."""
    if len(F) < 2:
        return 0.0
    a1, b1 = F.terms[0]
    b2 = F.terms[1][1]
    mass = sum(abs(a / a1) for a, _ in F.terms[1:])
    return max(0.0, math.log(mass) / math.log(b1 / b2)) + T_MARGIN


@dataclass(frozen=True)
class ZeroScan:
    zeros: tuple[float, ...]
    tangencies: tuple[float, ...] = ()
    descartes_bound: int = 0
    cells: int = 0

    def __iter__(self):
        return iter(self.zeros)

    def __len__(self) -> int:
        return len(self.zeros)


def _bisect(G, a: float, b: float, ga: float, tol: float) -> float:
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        gm = float(G(m))
        if gm == 0.0:
            return m
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def exp_sum_zeros(
    F: ExpSum, lo: float, tol: float = ZERO_TOL, hi: float | None = None
) -> ZeroScan:
    """Sign-change zeros of ``F`` in ``(lo, min(hi, T*)]``, ascending.

    The window is scanned on a log-spaced grid, doubled until the zero count
    repeats or reaches the sign-change bound, and each bracket is bisected to
    ``tol``. Local minima of ``|F|`` that nearly touch zero without a sign
    change are reported as tangencies, not as zeros.
    """
    if lo <= 0:
        raise ValueError("lo must be positive")
    if tol < 1e-13:
        raise ValueError("tol must be >= 1e-13")
    bound = F.sign_changes()
    upper = zero_upper_bound(F)
    if hi is not None:
        upper = min(upper, hi)
    if len(F) < 2 or bound == 0 or upper <= lo:
        return ZeroScan((), (), bound, 0)

    G = F.normalized
    cells = INITIAL_CELLS
    prev = None
    while True:
        grid = lo * (upper / lo) ** (np.arange(cells + 1) / cells)
        grid[-1] = upper
        vals = G(grid)
        zeros, tangencies = _scan(G, grid, vals, tol)
        if len(zeros) >= bound or len(zeros) == prev or cells >= MAX_CELLS:
            break
        prev = len(zeros)
        cells *= 2
    zeros = sorted(z for z in zeros if lo < z <= upper)
    return ZeroScan(tuple(zeros), tuple(sorted(tangencies)), bound, cells)


def _scan(G, grid: np.ndarray, vals: np.ndarray, tol: float):
    zeros: list[float] = []
    tangencies: list[float] = []
    n = len(grid)
    sgn = np.sign(vals)
    for i in range(n):
        if sgn[i] == 0:
            zeros.append(float(grid[i]))
    for i in range(n - 1):
        if sgn[i] != 0 and sgn[i + 1] != 0 and sgn[i] != sgn[i + 1]:
            zeros.append(_bisect(G, float(grid[i]), float(grid[i + 1]), float(vals[i]), tol))
    # near-touching local minima of |G| with no sign change nearby
    absv = np.abs(vals)
    for i in range(1, n - 1):
        if not (absv[i] <= absv[i - 1] and absv[i] <= absv[i + 1]):
            continue
        if sgn[i - 1] != sgn[i] or sgn[i + 1] != sgn[i] or sgn[i] == 0:
            continue
        s = float(sgn[i])
        a, b = float(grid[i - 1]), float(grid[i + 1])
        res = minimize_scalar(lambda t: s * float(G(t)), bounds=(a, b), method="bounded",
                              options={"xatol": tol})
        tm, gm = float(res.x), float(res.fun)
        if gm < -NOISE_FLOOR:
            # two crossings hidden inside one cell
            zeros.append(_bisect(G, a, tm, s, tol))
            zeros.append(_bisect(G, tm, b, -s, tol))
        elif gm < TANGENCY_TOL:
            tangencies.append(tm)
    return zeros, tangencies


def intersection_points(x, y, lo: float, hi: float | None = None, tol: float = ZERO_TOL) -> list[float]:
    """Parameters ``t > lo`` where two distinct norm curves meet."""
    x, y = as_height_vector(x), as_height_vector(y)
    if same_norm_function(x, y):
        return []
    return list(exp_sum_zeros(exp_sum_from_pair(x, y), lo, tol, hi).zeros)


class VectorSet:
    """Height vectors with pairwise distinct norm functions, first occurrence kept."""

    def __init__(self, members: Iterable = ()):
        kept: list[HeightVector] = []
        for m in members:
            m = as_height_vector(m)
            if not any(same_norm_function(m, k) for k in kept):
                kept.append(m)
        self.members: tuple[HeightVector, ...] = tuple(kept)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i) -> HeightVector:
        return self.members[i]

    def index(self, v) -> int:
        v = as_height_vector(v)
        for i, m in enumerate(self.members):
            if same_norm_function(m, v):
                return i
        raise ValueError(f"{v!r} is not a member")

    def __repr__(self) -> str:
        return f"VectorSet({[m.tolist() for m in self.members]!r})"


def asymptotic_min(X, return_rounds: bool = False):
    """The member that is smallest for all large ``t``.

    Keeps the members whose k-th coordinate is minimal, for k = 1, 2, ...,
    until one norm function remains; this is the lexicographic minimum of the
    descending-sorted vectors. With ``return_rounds`` also returns how many
    filtering rounds ran.
    """
    X = X if isinstance(X, VectorSet) else VectorSet(X)
    if not len(X):
        raise ValueError("need at least one vector")
    alive = list(X.members)
    k = 0
    while len(alive) > 1:
        m = min(v.coord(k) for v in alive)
        alive = [v for v in alive if v.coord(k) - m <= ENTRY_ATOL]
        k += 1
        if all(v.coord(k - 1) == 0.0 for v in alive):
            break
    return (alive[0], k) if return_rounds else alive[0]


@dataclass(frozen=True)
class Piece:
    t_lo: float
    t_hi: float  # math.inf for the unbounded final piece
    vector: HeightVector
    member: int


@dataclass(frozen=True)
class PiecewiseEnvelope:
    """``t -> min_x ||x||_t`` on ``(lo, hi]`` as pieces with one active vector each.

    Pieces are half-open: a breakpoint belongs to the piece on its right.
    ``breakpoints`` are all crossings found; ``exceptional`` are the ones where
    the active norm function changes.
    """

    lo: float
    hi: float
    members: VectorSet
    breakpoints: tuple[float, ...]
    pieces: tuple[Piece, ...]
    exceptional: tuple[float, ...]
    asymptotic: HeightVector | None = None  # depends on the vector set only, not on hi
    tangencies: tuple[float, ...] = ()
    merged: tuple[float, ...] = field(default=())
    filter_rounds: int = 0

    def piece_index(self, t: float) -> int:
        return bisect.bisect_right(self.exceptional, t)

    def active(self, t: float) -> HeightVector:
        return self.pieces[self.piece_index(t)].vector

    def value(self, t: float) -> float:
        return lt_norm(self.active(t), t)

    def to_dict(self) -> dict:
        fin = lambda v: None if math.isinf(v) else v  # noqa: E731
        return {
            "pieces": [
                {"t_lo": p.t_lo, "t_hi": fin(p.t_hi), "vector": p.vector.tolist()}
                for p in self.pieces
            ],
            "exceptional": list(self.exceptional),
            "asymptotic": self.asymptotic.tolist() if self.asymptotic is not None else None,
            "breakpoints": list(self.breakpoints),
            "vectors": [m.tolist() for m in self.members],
            "lo": self.lo,
            "hi": fin(self.hi),
        }


def lower_envelope(X, lo: float, hi: float = math.inf, tol: float = ZERO_TOL) -> PiecewiseEnvelope:
    """Assemble the lower envelope of the members of ``X`` over ``(lo, hi]``."""
    X = X if isinstance(X, VectorSet) else VectorSet(X)
    if not len(X):
        raise ValueError("need at least one vector")
    lo = float(lo)
    hi = check_t(hi)
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")

    members = X.members
    raw: list[float] = []
    tangencies: list[float] = []
    t_star = 0.0
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            F = exp_sum_from_pair(members[i], members[j])
            t_star = max(t_star, zero_upper_bound(F))
            scan = exp_sum_zeros(F, lo, tol, None if math.isinf(hi) else hi)
            raw.extend(scan.zeros)
            tangencies.extend(scan.tangencies)
    raw.sort()

    breakpoints: list[float] = []
    merged: list[float] = []
    for z in raw:
        if breakpoints and z - breakpoints[-1] <= MERGE_TOL:
            merged.append(z)
            continue
        breakpoints.append(z)

    asym, rounds = asymptotic_min(X, return_rounds=True)
    edges = [lo] + breakpoints + [hi]
    active: list[int] = []
    for a, b in zip(edges, edges[1:]):
        if math.isinf(b):
            probe = max(a, t_star) + 1.0
        else:
            probe = 0.5 * (a + b)
        norms = [lt_norm(m, probe) for m in members]
        active.append(int(np.argmin(norms)))
    if math.isinf(hi):
        k = X.index(asym)
        probe = max(edges[-2], t_star) + 1.0
        best, got = lt_norm(members[active[-1]], probe), lt_norm(asym, probe)
        if got - best > 1e-10 * (1.0 + best):
            raise ArithmeticError("asymptotic minimizer disagrees with direct evaluation")
        active[-1] = k

    pieces: list[Piece] = []
    exceptional: list[float] = []
    start = lo
    for idx, (k, b) in enumerate(zip(active, edges[1:])):
        last = idx == len(active) - 1
        if not last and active[idx + 1] == k:
            continue
        pieces.append(Piece(start, b, members[k], k))
        if not last:
            exceptional.append(b)
            start = b

    return PiecewiseEnvelope(
        lo=lo,
        hi=hi,
        members=X,
        breakpoints=tuple(breakpoints),
        pieces=tuple(pieces),
        exceptional=tuple(exceptional),
        asymptotic=asym,
        tangencies=tuple(sorted(tangencies)),
        merged=tuple(merged),
        filter_rounds=rounds,
    )


def envelope_from_dict(data: dict) -> PiecewiseEnvelope:
    """Rebuild an envelope from :meth:`PiecewiseEnvelope.to_dict` output."""
    vectors = data.get("vectors")
    if vectors is None:
        vectors = [p["vector"] for p in data["pieces"]]
    hi = data.get("hi")
    return lower_envelope(vectors, data["lo"], math.inf if hi is None else hi)


def min_norm(X: Sequence, t: float) -> float:
    return min(lt_norm(x, t) for x in X)
