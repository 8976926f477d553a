"""Sato-Tate angles of cusp-form coefficients and their spacing statistics."""

__version__ = "0.1.0"

from .angles import AngleSeries, UnfoldedSeries, angle_series, density_histogram, st_density, unfold, unfolded_series
from .curves import CurveSpec, count_points, trace_ap
from .eta import CoefficientTable, EtaProductSpec, coefficient, eta_product, euler_series
from .hecke import ConsistencyReport, check_hecke_recursion, check_multiplicativity
from .primes import PrimeTable, first_n_primes, sieve
from .spacing import (
    GofReport,
    SpacingSample,
    chi_square_test,
    ks_test,
    mean_check,
    pair_correlation,
    poisson_cdf,
    poisson_density,
    spacings,
    uniformity_ks,
)

__all__ = [
    "AngleSeries",
    "CoefficientTable",
    "ConsistencyReport",
    "CurveSpec",
    "EtaProductSpec",
    "GofReport",
    "PrimeTable",
    "SpacingSample",
    "UnfoldedSeries",
    "angle_series",
    "check_hecke_recursion",
    "check_multiplicativity",
    "chi_square_test",
    "coefficient",
    "count_points",
    "density_histogram",
    "eta_product",
    "euler_series",
    "first_n_primes",
    "ks_test",
    "mean_check",
    "pair_correlation",
    "poisson_cdf",
    "poisson_density",
    "sieve",
    "spacings",
    "st_density",
    "trace_ap",
    "unfold",
    "unfolded_series",
    "uniformity_ks",
]
