"""Input checking shared by the estimators and the CLI."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .norms import HeightVector, check_t

DEFAULT_T_LO = 0.25
DEFAULT_T_HI = 8.0
DEFAULT_T_COUNT = 64


def make_t_grid(lo: float = DEFAULT_T_LO, hi: float = DEFAULT_T_HI,
                count: int = DEFAULT_T_COUNT, log: bool = True) -> list[float]:
    """``count`` points from ``lo`` to ``hi`` inclusive; an infinite ``hi`` appends ``inf``.

    With ``hi = inf`` the finite part runs from ``lo`` to ``DEFAULT_T_HI``
    (or ``2 * lo`` if that is smaller) using ``count - 1`` points.
    """
    lo = float(lo)
    hi = check_t(hi)
    count = int(count)
    if lo <= 0:
        raise ValueError("grid lo must be positive")
    if count < 1:
        raise ValueError("grid count must be >= 1")
    tail: list[float] = []
    if math.isinf(hi):
        tail = [math.inf]
        count -= 1
        hi = max(DEFAULT_T_HI, 2 * lo)
        if count == 0:
            return tail
    if hi <= lo and count > 1:
        raise ValueError("grid needs lo < hi")
    if count == 1:
        pts = [lo]
    elif log:
        pts = np.geomspace(lo, hi, count).tolist()
    else:
        pts = np.linspace(lo, hi, count).tolist()
    pts[-1] = hi if count > 1 else pts[-1]
    return pts + tail


def check_t_grid(grid: Iterable[float]) -> list[float]:
    if np.isscalar(grid):
        grid = [grid]
    out = [check_t(t) for t in grid]
    if not out:
        raise ValueError("t grid must be nonempty")
    return out


def check_increasing(grid: list[float]) -> list[float]:
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("t grid must be strictly increasing")
    return grid


def check_vectors(X) -> list[HeightVector]:
    """Coerce an iterable of vectors (ragged allowed) to height vectors."""
    if isinstance(X, np.ndarray) and X.ndim == 1 and X.dtype != object:
        X = [X]
    vecs = [v if isinstance(v, HeightVector) else HeightVector(np.asarray(v, dtype=float).ravel())
            for v in X]
    if not vecs:
        raise ValueError("need at least one vector")
    return vecs
