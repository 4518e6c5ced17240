"""Heights on abelian groups: Mahler measures, restricted t-metric search and norm envelopes."""

from .algebraic import (
    ConvergenceError,
    IntPolynomial,
    MahlerResult,
    mahler_measure,
    poly_roots,
    reducibility_screen,
    weil_height_algebraic,
)
from .envelope import (
    ExpSum,
    PiecewiseEnvelope,
    VectorSet,
    asymptotic_min,
    envelope_from_dict,
    exp_sum_from_pair,
    exp_sum_zeros,
    intersection_points,
    lower_envelope,
)
from .estimators import HeightTransformer, NormEnvelope, RestrictedTMetric
from .norms import HeightVector, check_height_axioms, check_t_triangle, lt_norm, same_norm_function
from .primes import divisors, factor_integer, is_prime
from .rational import FactoredRational, Factorization, parse_rational, weil_height
from .search import (
    CandidateSet,
    SearchBudgetExceeded,
    SpanError,
    TMetricResult,
    brute_force_tmetric,
    collapse_bound,
    divisor_candidate_set,
    restricted_tmetric,
    search_bound,
    tmetric_profile,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateSet", "ConvergenceError", "ExpSum", "FactoredRational", "Factorization",
    "HeightTransformer", "HeightVector", "IntPolynomial", "MahlerResult", "NormEnvelope",
    "PiecewiseEnvelope", "RestrictedTMetric", "SearchBudgetExceeded", "SpanError",
    "TMetricResult", "VectorSet", "asymptotic_min", "brute_force_tmetric",
    "check_height_axioms", "check_t_triangle", "collapse_bound", "divisor_candidate_set",
    "divisors", "envelope_from_dict", "exp_sum_from_pair", "exp_sum_zeros", "factor_integer",
    "intersection_points", "is_prime", "lower_envelope", "lt_norm", "mahler_measure",
    "parse_rational", "poly_roots", "reducibility_screen", "restricted_tmetric",
    "same_norm_function", "search_bound", "tmetric_profile", "weil_height",
    "weil_height_algebraic",
]
