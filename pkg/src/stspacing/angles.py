"""Sato-Tate angles, their density, and the unfolding map onto [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundViolationError,
    ConfigError,
    DomainError,
    EmptySeriesError,
    IndexRangeError,
    InternalConsistencyError,
)
from .eta import CoefficientTable, within_deligne_bound
from .histogram import Histogram, build_histogram

CLAMP_TOLERANCE = 1e-12
DEFAULT_ANGLE_BINS = 40


@dataclass(frozen=True)
class AngleRecord:
    p: int
    a_p: int
    cos_theta: float
    theta: float


@dataclass(frozen=True)
class AngleSeries:
    records: tuple[AngleRecord, ...]
    weight: int
    source_label: str = ""

    def __len__(self):
        return len(self.records)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([r.theta for r in self.records], dtype=float)

    @property
    def primes(self) -> list[int]:
        return [r.p for r in self.records]


@dataclass(frozen=True, eq=False)
class UnfoldedSeries:
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def sample_size(self) -> int:
        return len(self.values)

    M = sample_size


def normalized_trace(a_p: int, p: int, weight: int) -> float:
    """a_p / (2 p^((weight-1)/2)) as a float, from exact integer inputs."""
    half, odd = divmod(weight - 1, 2)
    # int / int is correctly rounded, so only the sqrt step adds error.
    x = a_p / (2 * p**half)
    return x / math.sqrt(p) if odd else x


def angles_from_traces(traces, weight: int, label: str = "") -> AngleSeries:
    """Angles from (p, a_p) pairs; the bound is checked exactly before any float work."""
    records = []
    for p, ap in traces:
        p, ap = int(p), int(ap)
        if not within_deligne_bound(ap, p, weight):
            raise BoundViolationError(f"a_{p} = {ap} violates |a_p| <= 2 p^(({weight}-1)/2)")
        c = normalized_trace(ap, p, weight)
        if abs(c) > 1.0 + CLAMP_TOLERANCE:
            raise InternalConsistencyError(f"cos(theta_{p}) = {c!r} outside [-1, 1] after exact bound check")
        c = min(1.0, max(-1.0, c))
        records.append(AngleRecord(p, ap, c, math.acos(c)))
    records.sort(key=lambda r: r.p)
    return AngleSeries(tuple(records), weight, label)


def angle_series(table: CoefficientTable, primes) -> AngleSeries:
    pairs = []
    for p in primes:
        p = int(p)
        if p > table.n_max:
            raise IndexRangeError(f"prime {p} beyond table n_max {table.n_max}")
        pairs.append((p, table.values[p - 1]))
    return angles_from_traces(pairs, table.weight, table.label)


def _check_domain(theta):
    arr = np.asarray(theta, dtype=float)
    if np.any((arr < 0) | (arr > math.pi)) or np.any(np.isnan(arr)):
        raise DomainError("theta must lie in [0, pi]")
    return arr


def st_density(theta):
    """(2/pi) sin^2(theta) on [0, pi]."""
    arr = _check_domain(theta)
    out = (2.0 / math.pi) * np.sin(arr) ** 2
    return float(out) if out.ndim == 0 else out


def unfold(theta):
    """Sato-Tate CDF, (theta - sin(theta) cos(theta)) / pi."""
    arr = _check_domain(theta)
    out = (arr - np.sin(arr) * np.cos(arr)) / math.pi
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def unfolded_series(angles: AngleSeries) -> UnfoldedSeries:
    if not len(angles):
        raise EmptySeriesError("no angles to unfold")
    return UnfoldedSeries(np.sort(unfold(angles.thetas)))


def density_histogram(angles: AngleSeries, bins: int = DEFAULT_ANGLE_BINS) -> Histogram:
    """Equal-width histogram of theta on [0, pi] against the Sato-Tate density."""
    if bins < 2:
        raise ConfigError("bins", "need at least 2 bins")
    edges = np.linspace(0.0, math.pi, bins + 1)
    return build_histogram(angles.thetas, edges, st_density, unfold)
