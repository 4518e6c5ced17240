"""Restricted t-metric heights on Q^x relative to a finite candidate set.

Given a target ``alpha`` and a finite set ``S`` closed under inversion, the
restricted value is the least L_t norm of the height vector of any multiset
of parts from ``S`` whose product is ``alpha``. Parts are exponent vectors over
the primes involved (plus a sign bit), so a factorization is an integer vector
decomposition; the search is a depth-first branch and bound over multisets in
canonical order.

Ties are broken by fewer non-torsion parts, then by the lexicographically
smaller descending height vector. All reported values are *restricted*: they
equal the true t-metric height only when ``S`` happens to replace the group.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .norms import INFINITY, HeightVector, check_t, lt_norm, same_norm_function
from .primes import MAX_INPUT, divisors
from .rational import FactoredRational, Factorization, as_rational, product, weil_height

DEFAULT_BUDGET = 10**6
BRUTE_FORCE_BUDGET = 10**7
_REL_TOL = 1e-12


class SpanError(ValueError):
    """The target is not in the subgroup generated by the candidate set."""


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, message: str, incumbent: TMetricResult | None = None):
        super().__init__(message)
        self.incumbent = incumbent


def node_budget() -> int:
    """Node budget for one search; ``METRIC_HEIGHT_BUDGET`` overrides the default."""
    raw = os.environ.get("METRIC_HEIGHT_BUDGET")
    if raw:
        try:
            val = int(raw)
        except ValueError:
            raise ValueError(f"METRIC_HEIGHT_BUDGET must be an integer, got {raw!r}") from None
        if val <= 0:
            raise ValueError("METRIC_HEIGHT_BUDGET must be positive")
        return val
    return DEFAULT_BUDGET


class CandidateSet:
    """A finite subset of Q^x containing 1 and closed under inversion, with Weil heights."""

    def __init__(self, elements: Iterable, close: bool = True):
        elems = {as_rational(e) for e in elements}
        elems.add(FactoredRational.identity())
        if close:
            elems |= {e.inverse() for e in elems}
        elif any(e.inverse() not in elems for e in elems):
            raise ValueError("candidate set must be closed under inversion")
        heights = {e: weil_height(e) for e in elems}
        # deterministic order: height descending, then by value
        self.elements: tuple[FactoredRational, ...] = tuple(
            sorted(elems, key=lambda e: (-heights[e], e.sign < 0, str(e)))
        )
        self.heights: dict[FactoredRational, float] = heights
        nonzero = [h for h in heights.values() if h > 0]
        self.delta: float = min(nonzero) if nonzero else 0.0

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return as_rational(x) in self.heights

    @property
    def has_minus_one(self) -> bool:
        return -FactoredRational.identity() in self.heights

    def __repr__(self) -> str:
        return f"CandidateSet({sorted(str(e) for e in self.elements)})"


def divisor_candidate_set(n: int) -> CandidateSet:
    """``{+-1} | {+-d, +-1/d : d | n, d > 1}``."""
    n = int(n)
    if n == 0:
        raise ValueError("zero is not a group element")
    if abs(n) > MAX_INPUT:
        raise ValueError(f"{n} exceeds the supported magnitude 2**63 - 1")
    elems = [FactoredRational.from_int(s * d) for d in divisors(n) for s in (1, -1)]
    return CandidateSet(elems)


def rational_divisor_candidate_set(q) -> CandidateSet:
    """``{+-a/b : a | numerator, b | denominator}``, which contains ``q`` itself."""
    q = as_rational(q)
    elems = [FactoredRational.from_fraction(Fraction(s * a, b))
             for a in divisors(q.numerator) for b in divisors(q.denominator) for s in (1, -1)]
    return CandidateSet(elems)


@dataclass(frozen=True)
class TMetricResult:
    value: float
    witness: Factorization
    t: float
    heights: HeightVector
    attained: bool = True
    nodes: int = 0
    label: str = "restricted"

    @property
    def n_parts(self) -> int:
        return len(self.heights)


def search_bound(phi_alpha: float, S: CandidateSet | float, u: float) -> int:
    """Most non-torsion parts a factorization with norm at most ``phi_alpha`` can have.

    Every such part costs at least ``delta^u``, hence ``B <= (phi_alpha/delta)^u``.
    """
    delta = S.delta if isinstance(S, CandidateSet) else float(S)
    u = float(u)
    if not (u > 0 and math.isfinite(u)):
        raise ValueError("u must be a positive finite real")
    if phi_alpha < 0:
        raise ValueError("phi_alpha must be nonnegative")
    if phi_alpha == 0:
        return 0
    if delta <= 0:
        raise ValueError("unbounded part count: delta = 0")
    return math.floor((phi_alpha / delta) ** u + 1e-9)


# -- integer lattice membership ------------------------------------------------


def _lattice_contains(gens: Sequence[Sequence[int]], target: Sequence[int]) -> bool:
    """Is ``target`` an integer combination of ``gens``?"""
    rows = [list(g) for g in gens if any(g)]
    ncols = len(target)
    pivots: list[tuple[int, list[int]]] = []
    for col in range(ncols):
        active = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (nxt if r[col] != 0 else rest).append(r)
            active = nxt
        if active:
            pivots.append((col, active[0]))
        rows = [r for r in rest if any(r)]
    vec = list(target)
    for col, row in pivots:
        if vec[col] % row[col] != 0:
            return False
        q = vec[col] // row[col]
        vec = [a - q * b for a, b in zip(vec, row)]
    return not any(vec)


# -- the search ----------------------------------------------------------------


def _better(a: tuple[float, list[float]], b: tuple[float, list[float]] | None) -> bool:
    """Order on (value, descending heights): value, then fewer parts, then lex."""
    if b is None:
        return True
    va, ha = a
    vb, hb = b
    tol = _REL_TOL * max(1.0, abs(va), abs(vb))
    if va < vb - tol:
        return True
    if va > vb + tol:
        return False
    if len(ha) != len(hb):
        return len(ha) < len(hb)
    for x, y in zip(ha, hb):
        if x < y - _REL_TOL:
            return True
        if x > y + _REL_TOL:
            return False
    return False


class _Problem:
    def __init__(self, alpha: FactoredRational, S: CandidateSet):
        self.alpha = alpha
        self.S = S
        primes = set(alpha.primes)
        for e in S.elements:
            primes.update(e.primes)
        self.primes = sorted(primes)
        self.logs = [math.log(p) for p in self.primes]
        self.sign_free = S.has_minus_one
        self.minus_one = -FactoredRational.identity()

        seen: dict = {}
        for e in sorted(S.elements, key=lambda e: e.sign < 0):
            h = S.heights[e]
            if h == 0:
                continue
            vec = e.exponent_vector(self.primes)
            key = vec if self.sign_free else (vec, e.sign)
            if key not in seen:
                seen[key] = (h, vec, 0 if (self.sign_free or e.sign > 0) else 1, e)
        parts = sorted(seen.values(), key=lambda p: (-p[0], p[1], p[2]))
        self.heights = [p[0] for p in parts]
        self.vecs = [p[1] for p in parts]
        self.sbits = [p[2] for p in parts]
        self.elems = [p[3] for p in parts]
        index = {(v, s): i for i, (v, s) in enumerate(zip(self.vecs, self.sbits))}
        self.inv = [index.get((tuple(-x for x in v), s), -1) for v, s in zip(self.vecs, self.sbits)]
        self.target = alpha.exponent_vector(self.primes)
        self.target_sbit = 0 if (self.sign_free or alpha.sign > 0) else 1

    def spans(self, allowed: Sequence[int] | None = None) -> bool:
        idx = range(len(self.vecs)) if allowed is None else allowed
        gens = [list(self.vecs[i]) + [self.sbits[i]] for i in idx]
        gens.append([0] * len(self.primes) + [2])
        if not self.sign_free and self.minus_one in self.S.heights:
            gens.append([0] * len(self.primes) + [1])
        return _lattice_contains(gens, list(self.target) + [self.target_sbit])

    def sign_ok(self, sbit: int) -> bool:
        return self.sign_free or sbit == 0

    def result(self, chosen: Sequence[int], t: float, nodes: int) -> TMetricResult:
        chosen = sorted(chosen)
        parts = [self.elems[i] for i in chosen]
        if product(parts) != self.alpha:
            parts.append(self.minus_one)
        heights = HeightVector(self.heights[i] for i in chosen)
        return TMetricResult(
            value=lt_norm(heights, t),
            witness=Factorization(tuple(parts), self.alpha),
            t=t,
            heights=heights,
            nodes=nodes,
        )


class _Searcher:
    def __init__(self, problem: _Problem, t: float, budget: int):
        self.pb = problem
        self.t = t
        self.budget = budget
        self.nodes = 0
        self.best: tuple[float, list[float]] | None = None
        self.best_parts: list[int] | None = None

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            inc = self.pb.result(self.best_parts, self.t, self.nodes) if self.best_parts is not None else None
            raise SearchBudgetExceeded(
                f"search budget exceeded after {self.budget} nodes", inc
            )

    # exact-size enumeration, used for t = inf and for a first incumbent
    def exact_k(self, k: int, allowed: list[int], want_all: bool) -> list[list[int]]:
        pb = self.pb
        P = len(pb.primes)
        maxabs = [max((abs(pb.vecs[i][p]) for i in allowed), default=0) for p in range(P)]
        found: list[list[int]] = []
        counts = [0] * len(pb.vecs)

        class _Done(Exception):
            pass

        def rec(pos: int, res: tuple[int, ...], sbit: int, chosen: list[int]):
            self.tick()
            m = k - len(chosen)
            if m == 0:
                if not any(res) and pb.sign_ok(sbit):
                    found.append(list(chosen))
                    if not want_all:
                        raise _Done
                return
            for p in range(P):
                if abs(res[p]) > m * maxabs[p]:
                    return
            for j in range(pos, len(allowed)):
                i = allowed[j]
                inv = pb.inv[i]
                if inv >= 0 and counts[inv]:
                    continue
                counts[i] += 1
                chosen.append(i)
                rec(j, tuple(a - b for a, b in zip(res, pb.vecs[i])), sbit ^ pb.sbits[i], chosen)
                chosen.pop()
                counts[i] -= 1

        try:
            rec(0, pb.target, pb.target_sbit, [])
        except _Done:
            pass
        return found

    def min_count(self, allowed: list[int], want_all: bool) -> list[list[int]]:
        k = 1
        while True:
            found = self.exact_k(k, allowed, want_all)
            if found:
                return found
            k += 1

    def offer(self, chosen: list[int]) -> None:
        hs = sorted((self.pb.heights[i] for i in chosen), reverse=True)
        cand = (lt_norm(hs, self.t), hs)
        if _better(cand, self.best):
            self.best = cand
            self.best_parts = list(chosen)

    def solve_infinity(self) -> list[int]:
        pb = self.pb
        levels: list[float] = []
        for h in sorted(set(pb.heights)):
            if not levels or h - levels[-1] > _REL_TOL * max(1.0, h):
                levels.append(h)
        for level in levels:
            allowed = [i for i, h in enumerate(pb.heights) if h <= level + _REL_TOL * max(1.0, level)]
            if pb.spans(allowed):
                for sol in self.min_count(allowed, want_all=True):
                    self.offer(sol)
                return self.best_parts
        raise SpanError("candidate set does not span target")

    def _greedy(self, hp: list[float], lower_bound) -> list[int] | None:
        """Repeatedly take the part minimizing its cost plus the remaining bound."""
        pb = self.pb
        res, sbit = pb.target, pb.target_sbit
        chosen: list[int] = []
        counts = [0] * len(pb.vecs)
        for _ in range(4 * sum(abs(x) for x in pb.target) + 4):
            if not any(res) and pb.sign_ok(sbit):
                return chosen
            best_i, best_score = -1, math.inf
            for i, v in enumerate(pb.vecs):
                if pb.inv[i] >= 0 and counts[pb.inv[i]]:
                    continue
                self.tick()
                nres = tuple(a - b for a, b in zip(res, v))
                score = hp[i] + lower_bound(nres, sbit ^ pb.sbits[i])
                if score < best_score:
                    best_i, best_score = i, score
            if best_i < 0:
                return None
            counts[best_i] += 1
            chosen.append(best_i)
            res = tuple(a - b for a, b in zip(res, pb.vecs[best_i]))
            sbit ^= pb.sbits[best_i]
        return None

    def solve_finite(self) -> list[int]:
        pb = self.pb
        t = self.t
        hp = [h**t for h in pb.heights]
        w = [lg**t for lg in pb.logs]
        delta = min(pb.heights)
        delta_t = delta**t
        hmax = max(pb.heights)
        P = len(pb.primes)

        def lower_bound(res: tuple[int, ...], sbit: int) -> float:
            if not any(res):
                return 0.0 if pb.sign_ok(sbit) else delta_t
            up = down = 0.0
            if t >= 1:
                for p in range(P):
                    if res[p] > 0:
                        up += res[p] * w[p]
                    elif res[p] < 0:
                        down -= res[p] * w[p]
                return max(up, down, delta_t)
            for p in range(P):
                if res[p] > 0:
                    up += res[p] * pb.logs[p]
                elif res[p] < 0:
                    down -= res[p] * pb.logs[p]
            hr = max(up, down)
            return max(hr**t, hr * hmax ** (t - 1.0), delta_t)

        # incumbent: best of alpha itself, a greedy descent and a fewest-parts solution
        # offered as soon as found so a budget failure can report them
        for i, (v, s) in enumerate(zip(pb.vecs, pb.sbits)):
            if v == pb.target and (pb.sign_free or s == pb.target_sbit):
                self.offer([i])
                break
        greedy = self._greedy(hp, lower_bound)
        if greedy is not None:
            self.offer(greedy)
        if self.best_parts is None:
            self.offer(self.min_count(list(range(len(pb.vecs))), want_all=False)[0])
        inc_cost = [math.fsum(hp[i] for i in self.best_parts)]
        cap = [math.floor(inc_cost[0] / delta_t + 1e-9)]

        counts = [0] * len(pb.vecs)

        def rec(pos: int, res: tuple[int, ...], sbit: int, chosen: list[int], cost: float):
            self.tick()
            if not any(res) and pb.sign_ok(sbit):
                if cost <= inc_cost[0] * (1 + _REL_TOL) + _REL_TOL:
                    before = self.best
                    self.offer(chosen)
                    if self.best is not before:
                        inc_cost[0] = min(inc_cost[0], cost)
                        cap[0] = math.floor(inc_cost[0] / delta_t + 1e-9)
                return
            if len(chosen) >= cap[0]:
                return
            limit = inc_cost[0] * (1 + _REL_TOL) + _REL_TOL
            for i in range(pos, len(pb.vecs)):
                inv = pb.inv[i]
                if inv >= 0 and counts[inv]:
                    continue
                ncost = cost + hp[i]
                if ncost > limit:
                    continue
                nres = tuple(a - b for a, b in zip(res, pb.vecs[i]))
                nsbit = sbit ^ pb.sbits[i]
                if ncost + lower_bound(nres, nsbit) > limit:
                    continue
                counts[i] += 1
                chosen.append(i)
                rec(i, nres, nsbit, chosen, ncost)
                chosen.pop()
                counts[i] -= 1
                limit = inc_cost[0] * (1 + _REL_TOL) + _REL_TOL

        rec(0, pb.target, pb.target_sbit, [], 0.0)
        return self.best_parts


def restricted_tmetric(alpha, S: CandidateSet, t: float, budget: int | None = None) -> TMetricResult:
    """Least L_t norm over factorizations of ``alpha`` into parts from ``S``, with a witness.

    Raises :class:`SpanError` if ``S`` does not generate ``alpha`` and
    :class:`SearchBudgetExceeded` (carrying the best incumbent) when the node
    budget runs out.
    """
    alpha = as_rational(alpha)
    t = check_t(t)
    budget = node_budget() if budget is None else int(budget)
    pb = _Problem(alpha, S)
    if not any(pb.target) and pb.sign_ok(pb.target_sbit):
        return pb.result([], t, 0)
    if not pb.vecs or not pb.spans():
        raise SpanError("candidate set does not span target")
    searcher = _Searcher(pb, t, budget)
    chosen = searcher.solve_infinity() if math.isinf(t) else searcher.solve_finite()
    return pb.result(chosen, t, searcher.nodes)


def brute_force_tmetric(alpha, S: CandidateSet, t: float, max_parts: int) -> TMetricResult:
    """Exhaustive oracle: every multiset of at most ``max_parts`` non-torsion parts.

    When -1 is in ``S`` the parts are taken up to sign, which loses nothing
    because the sign can always be fixed for free. Raises ``ValueError`` when
    more than ``10**7`` multisets would be enumerated or when no factorization
    of that size exists.
    """
    alpha = as_rational(alpha)
    t = check_t(t)
    sign_free = S.has_minus_one
    elems = []
    seen = set()
    for e in S.elements:
        if e.is_torsion:
            continue
        key = (tuple(sorted(e.factors.items())), 1 if sign_free else e.sign)
        if key in seen:
            continue
        seen.add(key)
        elems.append(e)
    m = len(elems)
    total = sum(math.comb(m + k - 1, k) for k in range(max_parts + 1))
    if total > BRUTE_FORCE_BUDGET:
        raise ValueError(f"brute force would enumerate {total} multisets (> {BRUTE_FORCE_BUDGET})")

    primes = sorted({p for e in elems for p in e.primes} | set(alpha.primes))
    E = np.array([e.exponent_vector(primes) for e in elems], dtype=np.int64).reshape(m, len(primes))
    neg = np.array([e.sign < 0 for e in elems], dtype=np.int64)
    H = np.array([weil_height(e) for e in elems])
    target = np.array(alpha.exponent_vector(primes), dtype=np.int64)
    target_neg = int(alpha.sign < 0)
    have_minus_one = S.has_minus_one

    best = None
    best_idx: tuple[int, ...] | None = None

    def consider(idx_rows: np.ndarray):
        nonlocal best, best_idx
        k = idx_rows.shape[1]
        sums = E[idx_rows].sum(axis=1) if k else np.zeros((len(idx_rows), len(primes)), np.int64)
        ok = np.all(sums == target, axis=1)
        if not sign_free:
            parity = neg[idx_rows].sum(axis=1) % 2 if k else np.zeros(len(idx_rows), np.int64)
            ok &= parity == target_neg
        for row in idx_rows[ok]:
            hs = sorted(H[row].tolist(), reverse=True)
            cand = (lt_norm(hs, t), hs)
            if _better(cand, best):
                best, best_idx = cand, tuple(int(i) for i in row)

    for k in range(max_parts + 1):
        combos = itertools.combinations_with_replacement(range(m), k)
        while True:
            chunk = list(itertools.islice(combos, 200_000))
            if not chunk:
                break
            consider(np.array(chunk, dtype=np.int64).reshape(len(chunk), k))
    if best_idx is None:
        raise ValueError(f"no factorization of {alpha} with at most {max_parts} parts")

    parts = [elems[i] for i in best_idx]
    if product(parts) != alpha:
        if not have_minus_one:
            raise AssertionError("sign mismatch without -1 in the candidate set")
        parts.append(-FactoredRational.identity())
    heights = HeightVector(H[list(best_idx)].tolist())
    return TMetricResult(best[0], Factorization(tuple(parts), alpha), t, heights)


@dataclass(frozen=True)
class ProfileRow:
    t: float
    value: float
    witness_id: int
    result: TMetricResult


@dataclass(frozen=True)
class Profile:
    rows: tuple[ProfileRow, ...]
    witnesses: tuple[HeightVector, ...]

    @property
    def values(self) -> list[float]:
        return [r.value for r in self.rows]


def tmetric_profile(alpha, S: CandidateSet, t_grid: Sequence[float], budget: int | None = None) -> Profile:
    """Restricted values along an increasing grid, witnesses deduplicated by norm function."""
    grid = [check_t(t) for t in t_grid]
    if not grid:
        raise ValueError("t grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("t grid must be strictly increasing")
    witnesses: list[HeightVector] = []
    rows = []
    for t in grid:
        res = restricted_tmetric(alpha, S, t, budget)
        for wid, w in enumerate(witnesses):
            if same_norm_function(w, res.heights):
                break
        else:
            witnesses.append(res.heights)
            wid = len(witnesses) - 1
        rows.append(ProfileRow(t, res.value, wid, res))
    return Profile(tuple(rows), tuple(witnesses))


def collapse_bound(h_alpha: float, n: int, t: float) -> float:
    """``n^(1/t - 1) * h_alpha``: the L_t norm of ``n`` equal parts ``h_alpha/n``.

    Factoring ``alpha`` into ``n`` n-th roots shows the Weil-height t-metric
    value is at most this for every ``n``, so it collapses to 0 when ``t > 1``.
    """
    t = check_t(t)
    if math.isinf(t) or t <= 1:
        raise ValueError("bound only valid for t > 1 (finite)")
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if h_alpha < 0:
        raise ValueError("h_alpha must be nonnegative")
    return n ** (1.0 / t - 1.0) * h_alpha
