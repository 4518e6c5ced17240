"""scikit-learn style front ends.

The estimators hold configuration in ``__init__`` and learned state in
trailing-underscore attributes, so they work with ``get_params``/``set_params``,
``clone`` and pipelines. The learned quantities come from the functional API
in the sibling modules.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .algebraic import DEFAULT_TOL, IntPolynomial, as_polynomial, mahler_measure
from .envelope import ZERO_TOL, lower_envelope
from .norms import lt_norm
from .rational import as_rational, weil_height
from .search import (
    CandidateSet,
    divisor_candidate_set,
    rational_divisor_candidate_set,
    restricted_tmetric,
    tmetric_profile,
)
from .validation import DEFAULT_T_LO, check_increasing, check_t_grid, check_vectors, make_t_grid


class NormEnvelope(BaseEstimator):
    """Lower envelope of a finite family of norm curves ``t -> ||x||_t``.

    Parameters
    ----------
    t_lo, t_hi : float
        The interval ``(t_lo, t_hi]``; ``t_hi=inf`` also determines the
        asymptotic minimizer.
    tol : float
        Bisection tolerance for crossing points.

    Attributes
    ----------
    envelope_ : PiecewiseEnvelope
    exceptional_ : ndarray of crossing points where the active vector changes
    asymptotic_ : HeightVector, the member that is smallest for all large t
    """

    def __init__(self, t_lo=DEFAULT_T_LO, t_hi=math.inf, tol=ZERO_TOL):
        self.t_lo = t_lo
        self.t_hi = t_hi
        self.tol = tol

    def fit(self, X, y=None):
        vecs = check_vectors(X)
        self.envelope_ = lower_envelope(vecs, self.t_lo, self.t_hi, self.tol)
        self.members_ = self.envelope_.members.members
        self.n_members_ = len(self.members_)
        self.breakpoints_ = np.array(self.envelope_.breakpoints)
        self.exceptional_ = np.array(self.envelope_.exceptional)
        self.asymptotic_ = self.envelope_.asymptotic
        return self

    def predict(self, T):
        """Envelope value at each ``t``."""
        check_is_fitted(self, "envelope_")
        return np.array([self.envelope_.value(t) for t in check_t_grid(T)])

    def transform(self, T):
        """Norms of every member at each ``t``: shape ``(len(T), n_members)``."""
        check_is_fitted(self, "envelope_")
        ts = check_t_grid(T)
        return np.array([[lt_norm(m, t) for m in self.members_] for t in ts])

    def active_index(self, T):
        check_is_fitted(self, "envelope_")
        return np.array([self.envelope_.pieces[self.envelope_.piece_index(t)].member
                         for t in check_t_grid(T)])


class RestrictedTMetric(BaseEstimator):
    """Restricted t-metric Mahler measure of one rational along a t grid.

    ``fit(alpha)`` computes the profile on ``t_grid`` (default: 64 log-spaced
    points on ``[0.25, 8]``) and the envelope of the distinct witness vectors;
    ``predict(T)`` runs the exact search at arbitrary ``t``.

    ``candidates`` is ``"divisors"`` or an iterable of rationals.
    """

    def __init__(self, candidates="divisors", t_grid=None, budget=None):
        self.candidates = candidates
        self.t_grid = t_grid
        self.budget = budget

    def _candidate_set(self, alpha):
        if isinstance(self.candidates, CandidateSet):
            return self.candidates
        if isinstance(self.candidates, str):
            if self.candidates != "divisors":
                raise ValueError(f"unknown candidate source {self.candidates!r}")
            if alpha.denominator == 1:
                return divisor_candidate_set(alpha.numerator)
            return rational_divisor_candidate_set(alpha)
        return CandidateSet(self.candidates)

    def fit(self, X, y=None):
        self.alpha_ = as_rational(X)
        self.candidate_set_ = self._candidate_set(self.alpha_)
        grid = make_t_grid() if self.t_grid is None else check_increasing(check_t_grid(self.t_grid))
        self.profile_ = tmetric_profile(self.alpha_, self.candidate_set_, grid, self.budget)
        self.t_grid_ = np.array(grid)
        self.values_ = np.array(self.profile_.values)
        self.witnesses_ = self.profile_.witnesses
        self.envelope_ = lower_envelope(self.witnesses_, min(grid[0], DEFAULT_T_LO), math.inf)
        return self

    def predict(self, T):
        check_is_fitted(self, "profile_")
        return np.array([
            restricted_tmetric(self.alpha_, self.candidate_set_, t, self.budget).value
            for t in check_t_grid(T)
        ])


class HeightTransformer(TransformerMixin, BaseEstimator):
    """Map polynomials or rationals to ``[mahler_measure, weil_height, degree]`` rows.

    Strings containing a comma are read as ascending integer coefficients,
    anything else as a rational.
    """

    def __init__(self, tol=DEFAULT_TOL):
        self.tol = tol

    def fit(self, X, y=None):
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        rows = []
        for item in [X] if isinstance(X, str) else X:
            if isinstance(item, (list, tuple, IntPolynomial)) or (isinstance(item, str) and "," in item):
                res = mahler_measure(as_polynomial(item), self.tol, screen=False)
                rows.append([res.value, res.weil_height, res.degree])
            else:
                h = weil_height(as_rational(item))
                rows.append([h, h, 1])
        return np.array(rows, dtype=float)
