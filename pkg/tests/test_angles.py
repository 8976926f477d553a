import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from stspacing.angles import (
    AngleRecord,
    AngleSeries,
    angle_series,
    angles_from_traces,
    density_histogram,
    normalized_trace,
    st_density,
    unfold,
    unfolded_series,
)
from stspacing.errors import BoundViolationError, ConfigError, DomainError, EmptySeriesError, IndexRangeError
from stspacing.eta import CoefficientTable, eta_product
from stspacing.presets import PRESETS
from stspacing.primes import first_n_primes

thetas = st.floats(min_value=0.0, max_value=math.pi, allow_nan=False)


def test_weight_two_example():
    table = eta_product(PRESETS["a"].eta, 10)
    rec = angle_series(table, [2]).records[0]
    assert rec.a_p == -2
    assert rec.cos_theta == pytest.approx(-1 / math.sqrt(2), abs=1e-15)
    assert rec.theta == pytest.approx(3 * math.pi / 4, abs=1e-15)


def test_zero_trace_is_right_angle():
    series = angles_from_traces([(7, 0)], 2)
    assert series.records[0].theta == math.pi / 2


def test_weight_twelve_example():
    table = eta_product(PRESETS["c"].eta, 10)
    rec = angle_series(table, [2]).records[0]
    assert rec.cos_theta == pytest.approx(-24 / (2 * 2**5.5), rel=1e-15)
    assert rec.cos_theta == pytest.approx(-0.26516504294495535, abs=1e-15)
    assert rec.theta == pytest.approx(1.8392, abs=1e-4)


def test_bound_violation_is_an_error():
    fake = CoefficientTable((1, 3, 0), weight=2)  # 3^2 > 4 * 2
    with pytest.raises(BoundViolationError):
        angle_series(fake, [2])


def test_prime_beyond_table():
    with pytest.raises(IndexRangeError):
        angle_series(eta_product(PRESETS["a"].eta, 10), [11])


def test_bad_primes_included():
    table = eta_product(PRESETS["b"].eta, 20)
    series = angle_series(table, [2, 3, 5])
    assert [r.a_p for r in series.records] == [0, -2, -1]


@pytest.mark.parametrize("name, n", [("a", 500), ("c", 2000)])
def test_cos_theta_precision(name, n):
    primes = first_n_primes(n)
    table = eta_product(PRESETS[name].eta, primes.limit)
    mpmath.mp.prec = 120
    for rec in angle_series(table, primes).records:
        exact = mpmath.mpf(rec.a_p) / (2 * mpmath.power(rec.p, mpmath.mpf(table.weight - 1) / 2))
        if exact != 0:
            assert abs(rec.cos_theta - exact) <= abs(exact) * 2.0**-50
        assert 0.0 <= rec.theta <= math.pi


def test_normalized_trace_values():
    assert normalized_trace(0, 3, 12) == 0.0
    assert normalized_trace(-2, 2, 2) == pytest.approx(-1 / math.sqrt(2), abs=1e-16)
    assert normalized_trace(4, 7, 4) == pytest.approx(4 / (2 * 7**1.5), rel=1e-15)


@pytest.mark.parametrize(
    "theta, expected",
    [(0.0, 0.0), (math.pi / 2, 2 / math.pi), (math.pi / 4, 1 / math.pi)],
)
def test_st_density_values(theta, expected):
    assert st_density(theta) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("theta, expected", [(0.0, 0.0), (math.pi, 1.0), (math.pi / 2, 0.5)])
def test_unfold_values(theta, expected):
    assert unfold(theta) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [-1e-9, math.pi + 1e-9, float("nan")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        st_density(bad)
    with pytest.raises(DomainError):
        unfold(bad)


def test_unfold_monotone_on_dense_grid():
    grid = np.linspace(0.0, math.pi, 10_000)
    assert np.all(np.diff(unfold(grid)) > 0)


def test_unfold_matches_quadrature():
    grid = np.linspace(0.0, math.pi, 1000)
    closed = unfold(grid)
    for theta, value in zip(grid, closed):
        numeric, _ = integrate.quad(st_density, 0.0, theta, epsabs=1e-13, epsrel=1e-13)
        assert abs(value - numeric) < 1e-10


@given(thetas)
def test_unfold_symmetry(theta):
    assert abs(unfold(math.pi - theta) - (1.0 - unfold(theta))) < 1e-12


def test_unfolded_series_examples():
    single = unfolded_series(angles_from_traces([(5, 0)], 2))
    assert single.values.tolist() == [0.5] and single.M == 1
    pair = AngleSeries((AngleRecord(2, 0, 0.0, 2 * math.pi / 3), AngleRecord(3, 0, 0.0, math.pi / 3)), 2)
    u = unfolded_series(pair)
    assert u.values[0] < u.values[1]
    assert u.values[0] == pytest.approx(unfold(math.pi / 3))
    assert u.values.sum() == pytest.approx(1.0, abs=1e-15)


def test_unfolded_series_empty():
    with pytest.raises(EmptySeriesError):
        unfolded_series(AngleSeries((), 2))


def test_density_histogram_two_bins():
    series = AngleSeries((AngleRecord(2, 0, 0.0, math.pi / 4), AngleRecord(3, 0, 0.0, 3 * math.pi / 4)), 2)
    hist = density_histogram(series, 2)
    assert hist.density.tolist() == pytest.approx([1 / math.pi, 1 / math.pi])
    assert hist.reference.tolist() == pytest.approx([1 / math.pi, 1 / math.pi])


def test_density_histogram_empty_bins_and_normalization():
    series = angles_from_traces([(101, 0), (103, 1), (107, -3)], 2)
    hist = density_histogram(series, 40)
    assert hist.counts[0] == 0 and hist.density[0] == 0.0
    assert hist.reference[0] == pytest.approx(st_density(math.pi / 80))
    assert float(np.sum(hist.density * hist.widths)) == pytest.approx(1.0)
    assert float(np.sum(hist.model_prob)) == pytest.approx(1.0)


def test_density_histogram_needs_two_bins():
    with pytest.raises(ConfigError):
        density_histogram(angles_from_traces([(5, 0)], 2), 1)
