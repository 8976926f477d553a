"""Next^k nearest-neighbour spacings of unfolded values and their Poisson law.

For uncorrelated points, the gap spanning k+1 consecutive neighbours, scaled
by the sample size, follows the Gamma(k+1, 1) density s^k e^-s / k!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np
from scipy import special, stats

from .angles import UnfoldedSeries
from .errors import DomainError, InsufficientSampleError, UnderSampledError
from .histogram import Histogram, build_histogram

KS_COEFF_5PCT = 1.358
KS_COEFF_1PCT = 1.628
MIN_EXPECTED = 5.0
DEFAULT_SPACING_BINS = 50


def default_spacing_range(k: int) -> float:
    return 6.0 if k <= 1 else 8.0


@dataclass(frozen=True, eq=False)
class SpacingSample:
    k: int
    values: np.ndarray
    sample_size: int

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class GofReport:
    ks_statistic: float | None = None
    chi_square: float | None = None
    degrees_of_freedom: int | None = None
    sample_mean: float | None = None
    sample_count: int | None = None
    pass_at_5pct: bool | None = None
    pass_at_1pct: bool | None = None

    def combine(self, other: "GofReport") -> "GofReport":
        """Merge two partial reports; pass flags are and-ed."""
        updates = {}
        for f in fields(self):
            mine, theirs = getattr(self, f.name), getattr(other, f.name)
            if f.name.startswith("pass_") and mine is not None and theirs is not None:
                updates[f.name] = mine and theirs
            elif mine is None:
                updates[f.name] = theirs
        return replace(self, **updates)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def spacings(series: UnfoldedSeries, k: int) -> SpacingSample:
    """s_i = (Theta_{i+k+1} - Theta_i) * M for i = 1 .. M-k-1."""
    if k < 0:
        raise DomainError("spacing order k must be non-negative")
    m = series.sample_size
    if m < k + 2:
        raise InsufficientSampleError(f"order k={k} needs at least {k + 2} values, got {m}")
    v = series.values
    return SpacingSample(k, (v[k + 1 :] - v[: m - k - 1]) * m, m)


def _check_s(s):
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("s must be non-negative")
    return arr


def poisson_density(k: int, s):
    """s^k e^-s / k!."""
    arr = _check_s(s)
    out = np.exp(special.xlogy(k, arr) - arr - math.lgamma(k + 1))
    return float(out) if out.ndim == 0 else out


def poisson_cdf(k: int, s):
    """1 - e^-s sum_{j<=k} s^j / j!, the Gamma(k+1, 1) CDF."""
    arr = _check_s(s)
    term = np.ones_like(arr)
    partial = np.ones_like(arr)
    for j in range(1, k + 1):
        term = term * arr / j
        partial = partial + term
    out = 1.0 - np.exp(-arr) * partial
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def ks_statistic(values, cdf) -> float:
    """Two-sided sup |F_n - F| over both one-sided limits at each jump."""
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    f = cdf(x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus, 0.0))


def ks_critical(n: int, coeff: float = KS_COEFF_5PCT) -> float:
    return coeff / math.sqrt(n)


def _ks_report(values, cdf) -> GofReport:
    n = len(values)
    d = ks_statistic(values, cdf)
    return GofReport(
        ks_statistic=d,
        sample_mean=float(np.mean(values)),
        sample_count=n,
        pass_at_5pct=d < ks_critical(n, KS_COEFF_5PCT),
        pass_at_1pct=d < ks_critical(n, KS_COEFF_1PCT),
    )


def ks_test(sample: SpacingSample) -> GofReport:
    if len(sample) == 0:
        raise InsufficientSampleError("empty spacing sample")
    return _ks_report(sample.values, lambda x: poisson_cdf(sample.k, x))


def uniformity_ks(series: UnfoldedSeries) -> GofReport:
    """KS distance of the unfolded values from the uniform law on [0, 1]."""
    if series.sample_size == 0:
        raise InsufficientSampleError("empty series")
    return _ks_report(series.values, lambda x: np.clip(x, 0.0, 1.0))


def merge_bins(observed, expected, minimum: float = MIN_EXPECTED):
    """Pool adjacent bins left to right until each pool expects >= minimum.

    A short remainder at the right end joins the last full pool.
    """
    obs_out, exp_out = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= minimum:
            obs_out.append(o_acc)
            exp_out.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if obs_out:
            obs_out[-1] += o_acc
            exp_out[-1] += e_acc
        else:
            obs_out.append(o_acc)
            exp_out.append(e_acc)
    return np.array(obs_out), np.array(exp_out)


def chi_square_test(hist: Histogram, sample_count: int) -> GofReport:
    """Pearson statistic against the model mass of each bin.

    Samples beyond the last edge join the last bin together with the model
    tail mass; sparse bins are pooled to an expected count of at least 5.
    """
    if hist.model_prob is None:
        raise ValueError("histogram carries no model probabilities")
    observed = hist.counts.astype(float).copy()
    probs = np.asarray(hist.model_prob, dtype=float).copy()
    observed[-1] += hist.overflow
    probs[-1] += max(0.0, 1.0 - probs.sum())
    obs, exp = merge_bins(observed, probs * sample_count)
    dof = len(obs) - 1
    if dof < 1:
        raise UnderSampledError("fewer than two pooled bins expect 5 or more samples")
    stat = float(np.sum((obs - exp) ** 2 / exp))
    return GofReport(
        chi_square=stat,
        degrees_of_freedom=dof,
        sample_count=sample_count,
        pass_at_5pct=stat < chi_square_critical(dof, 0.05),
        pass_at_1pct=stat < chi_square_critical(dof, 0.01),
    )


def chi_square_critical(dof: int, level: float) -> float:
    return float(stats.chi2.ppf(1.0 - level, dof))


def mean_check(sample: SpacingSample) -> float:
    if len(sample) == 0:
        raise InsufficientSampleError("empty spacing sample")
    return float(np.mean(sample.values))


def mean_tolerance(k: int, n: int) -> float:
    """Four standard errors of the Gamma(k+1, 1) mean over n samples."""
    return 4.0 * math.sqrt((k + 1) / n)


def mean_within_tolerance(sample: SpacingSample) -> bool:
    return abs(mean_check(sample) - (sample.k + 1)) <= mean_tolerance(sample.k, len(sample))


def spacing_histogram(sample: SpacingSample, bins: int = DEFAULT_SPACING_BINS, range_: float | None = None) -> Histogram:
    if range_ is None:
        range_ = default_spacing_range(sample.k)
    edges = np.linspace(0.0, range_, bins + 1)
    k = sample.k
    return build_histogram(
        sample.values, edges, lambda s: poisson_density(k, s), lambda s: poisson_cdf(k, s)
    )


def pair_gaps(series: UnfoldedSeries, range_: float) -> np.ndarray:
    """All scaled gaps (Theta_j - Theta_i) * M, j > i, not exceeding range_."""
    m = series.sample_size
    if m < 2:
        raise InsufficientSampleError("pair correlation needs at least two values")
    v = series.values
    chunks = []
    for d in range(1, m):
        gaps = (v[d:] - v[:-d]) * m
        keep = gaps[gaps <= range_]
        if keep.size == 0:
            # Sorted input: gaps at larger offsets are no smaller.
            break
        chunks.append(keep)
    return np.concatenate(chunks) if chunks else np.empty(0)


def pair_correlation(series: UnfoldedSeries, bins: int, range_: float) -> Histogram:
    """Pair-gap histogram per unit length per sample; the Poisson level is 1."""
    gaps = pair_gaps(series, range_)
    m = series.sample_size
    edges = np.linspace(0.0, range_, bins + 1)
    counts, _ = np.histogram(gaps, bins=edges)
    widths = np.diff(edges)
    return Histogram(
        edges=edges,
        counts=counts.astype(np.int64),
        density=counts / (m * widths),
        reference=np.ones(bins),
        total=len(gaps),
    )


def monte_carlo_ks_pass_rate(n_points: int, k: int, reps: int, seed: int, level: float = 0.05) -> float:
    """Fraction of i.i.d. uniform samples whose spacings pass the KS test.

    Calibration aid only; the main pipeline uses asymptotic critical values.
    """
    rng = np.random.default_rng(seed)
    coeff = KS_COEFF_5PCT if level == 0.05 else KS_COEFF_1PCT
    passed = 0
    for _ in range(reps):
        series = UnfoldedSeries(np.sort(rng.random(n_points)))
        sample = spacings(series, k)
        d = ks_statistic(sample.values, lambda x: poisson_cdf(k, x))
        passed += d < ks_critical(len(sample), coeff)
    return passed / reps
