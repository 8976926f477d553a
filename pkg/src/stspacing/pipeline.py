"""End-to-end run: coefficients -> angles -> unfolding -> spacings -> tests -> files."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import __version__
from .angles import DEFAULT_ANGLE_BINS, angles_from_traces, angle_series, density_histogram, unfolded_series
from .cache import load_or_compute
from .curves import CurveSpec, trace_ap, trace_table
from .errors import ConfigError, CrossCheckError, InternalConsistencyError, UnderSampledError
from .eta import EtaProductSpec, check_deligne_bound
from .histogram import Histogram
from .hecke import bad_prime_summary, check_all_recursions, check_multiplicativity
from .primes import primes_for, sieve
from .spacing import (
    DEFAULT_SPACING_BINS,
    KS_COEFF_1PCT,
    GofReport,
    chi_square_critical,
    chi_square_test,
    default_spacing_range,
    ks_critical,
    ks_test,
    mean_check,
    mean_tolerance,
    pair_correlation,
    spacing_histogram,
    spacings,
    uniformity_ks,
)

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1
HIST_HEADER = ["bin_left", "bin_right", "count", "density", "reference_density"]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class RunConfig:
    eta: EtaProductSpec | None = None
    curve: CurveSpec | None = None
    cross_check: bool = True
    num_primes: int | None = None
    prime_limit: int | None = None
    k_list: list[int] = field(default_factory=lambda: [0, 1, 2])
    bins: int = DEFAULT_ANGLE_BINS
    spacing_bins: int = DEFAULT_SPACING_BINS
    spacing_range: float | None = None
    pair_correlation: bool = False
    pair_bins: int = 50
    pair_range: float = 10.0
    output_dir: Path = Path("out")
    cache_dir: Path | None = None
    label: str = ""

    def validate(self) -> None:
        if self.eta is None and self.curve is None:
            raise ConfigError("source", "need an eta product or a curve")
        if (self.num_primes is None) == (self.prime_limit is None):
            raise ConfigError("num_primes", "set exactly one of num_primes / prime_limit")
        if self.num_primes is not None and self.num_primes < 1:
            raise ConfigError("num_primes", "must be positive")
        if self.prime_limit is not None and self.prime_limit < 2:
            raise ConfigError("prime_limit", "must be at least 2")
        if not self.k_list or any(k < 0 for k in self.k_list):
            raise ConfigError("k", "need non-negative spacing orders")
        if self.bins < 2:
            raise ConfigError("bins", "need at least 2 bins")
        if self.spacing_bins < 1:
            raise ConfigError("spacing_bins", "must be positive")
        if self.spacing_range is not None and not self.spacing_range > 0:
            raise ConfigError("spacing_range", "must be positive")
        if self.pair_bins < 1 or not self.pair_range > 0:
            raise ConfigError("pair_range", "pair histogram needs positive bins and range")

    def echo(self) -> dict:
        """Config fields that determine the outputs (paths excluded)."""
        return {
            "eta": None if self.eta is None else [list(f) for f in self.eta.factors],
            "curve": None if self.curve is None else list(self.curve.coefficients),
            "conductor": None if self.curve is None else self.curve.conductor,
            "bad_primes": sorted(self._bad_primes()),
            "cross_check": self.cross_check,
            "num_primes": self.num_primes,
            "prime_limit": self.prime_limit,
            "k_list": list(self.k_list),
            "bins": self.bins,
            "spacing_bins": self.spacing_bins,
            "spacing_range": self.spacing_range,
            "pair_correlation": self.pair_correlation,
            "pair_bins": self.pair_bins,
            "pair_range": self.pair_range,
        }

    def _bad_primes(self):
        if self.eta is not None:
            return self.eta.bad_primes
        return self.curve.bad_primes


@dataclass
class RunResult:
    files: dict[str, Path]
    report: dict
    cache_hit: bool = False

    @property
    def stats_passed(self) -> bool:
        return self.report["acceptance"]["all_passed"]


REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema_version", "tool_version", "config", "source", "sample", "figures", "verification", "acceptance", "artifacts"],
    "additionalProperties": False,
    "definitions": {
        "gof": {
            "type": "object",
            "required": ["ks_statistic", "chi_square", "degrees_of_freedom", "sample_mean", "sample_count", "pass_at_5pct", "pass_at_1pct"],
            "properties": {
                "ks_statistic": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
                "chi_square": {"type": ["number", "null"], "minimum": 0},
                "degrees_of_freedom": {"type": ["integer", "null"]},
                "sample_mean": {"type": ["number", "null"]},
                "sample_count": {"type": ["integer", "null"]},
                "pass_at_5pct": {"type": ["boolean", "null"]},
                "pass_at_1pct": {"type": ["boolean", "null"]},
            },
        },
    },
    "properties": {
        "schema_version": {"const": REPORT_SCHEMA_VERSION},
        "tool_version": {"type": "string"},
        "config": {"type": "object"},
        "source": {
            "type": "object",
            "required": ["label", "weight", "coefficients"],
        },
        "sample": {
            "type": "object",
            "required": ["num_primes", "prime_limit", "max_prime"],
            "properties": {
                "num_primes": {"type": "integer", "minimum": 1},
                "prime_limit": {"type": "integer"},
                "max_prime": {"type": "integer"},
            },
        },
        "figures": {
            "type": "object",
            "required": ["density", "unfolded", "spacing"],
            "properties": {
                "density": {"allOf": [{"$ref": "#/definitions/gof"}], "required": ["bins", "chi_square_critical_1pct"]},
                "unfolded": {"allOf": [{"$ref": "#/definitions/gof"}], "required": ["ks_critical_1pct"]},
                "spacing": {
                    "type": "object",
                    "patternProperties": {
                        "^k[0-9]+$": {
                            "allOf": [{"$ref": "#/definitions/gof"}],
                            "required": ["k", "ks_critical_1pct", "mean_target", "mean_tolerance", "chi_square_note"],
                        }
                    },
                    "additionalProperties": False,
                },
                "pair_correlation": {"type": "object"},
            },
        },
        "verification": {
            "type": "object",
            "required": ["cross_check", "bound_violations"],
        },
        "acceptance": {
            "type": "object",
            "required": ["all_passed", "criteria"],
            "properties": {
                "all_passed": {"type": "boolean"},
                "criteria": {"type": "object", "additionalProperties": {"type": "boolean"}},
            },
        },
        "artifacts": {
            "type": "object",
            "additionalProperties": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        },
    },
}


def validate_report(report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)


def _write_csv(path: Path, header, rows) -> str:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _hist_rows(hist: Histogram):
    for left, right, count, density, ref in hist.rows():
        yield fmt(left), fmt(right), count, fmt(density), fmt(ref)


def cross_check(table, curve: CurveSpec, primes) -> dict:
    """Require eta coefficient == point-count trace at every good prime."""
    checked = 0
    for p in primes:
        p = int(p)
        if not curve.has_good_reduction(p):
            continue
        ap = trace_ap(curve, p)
        if table.values[p - 1] != ap:
            raise CrossCheckError(p, table.values[p - 1], ap)
        checked += 1
    return {"enabled": True, "good_primes_checked": checked, "mismatches": 0}


def _safe_chi(hist, n) -> GofReport:
    try:
        return chi_square_test(hist, n)
    except UnderSampledError as exc:
        log.warning("chi-square skipped: %s", exc)
        return GofReport()


def run_pipeline(config: RunConfig) -> RunResult:
    config.validate()
    primes = primes_for(config.num_primes, config.prime_limit)
    max_prime = int(primes.primes[-1])
    log.info("using %d primes up to %d", len(primes), max_prime)

    verification = {"cross_check": {"enabled": False}, "bound_violations": 0}
    cache_hit = False
    if config.eta is not None:
        table, hit = load_or_compute(config.eta, max_prime, config.cache_dir)
        cache_hit = hit
        source = {"label": config.eta.label, "weight": table.weight, "coefficients": "eta_product"}
        if config.curve is not None and config.cross_check:
            verification["cross_check"] = cross_check(table, config.curve, primes)
        angles = angle_series(table, primes)
    else:
        traces = trace_table(config.curve, primes)
        skipped = [p for p in primes if p not in traces]
        if skipped:
            log.warning("curve-only source: bad primes %s have no point-count trace and are left out", skipped)
        label = config.curve.label or "curve"
        source = {"label": label, "weight": 2, "coefficients": "point_count", "skipped_bad_primes": skipped}
        angles = angles_from_traces(sorted(traces.items()), 2, label)

    verification["bound_checked_primes"] = len(angles)
    unfolded = unfolded_series(angles)
    m = unfolded.sample_size
    # Spacing samples first: too few primes should fail before any file is written.
    samples = {k: spacings(unfolded, k) for k in config.k_list}

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files, checksums = {}, {}

    def emit(name, header, rows):
        path = out / name
        checksums[name] = _write_csv(path, header, rows)
        files[name] = path

    emit(
        "angles.csv",
        ["prime", "a_p", "cos_theta", "theta"],
        ((r.p, r.a_p, fmt(r.cos_theta), fmt(r.theta)) for r in angles.records),
    )
    emit("unfolded.csv", ["rank_i", "theta_unfolded"], ((i, fmt(v)) for i, v in enumerate(unfolded.values, start=1)))

    dens = density_histogram(angles, config.bins)
    emit("density_hist.csv", HIST_HEADER, _hist_rows(dens))
    dens_gof = _safe_chi(dens, len(angles))
    dens_entry = dens_gof.to_dict() | {
        "bins": config.bins,
        "chi_square_critical_1pct": None
        if dens_gof.degrees_of_freedom is None
        else chi_square_critical(dens_gof.degrees_of_freedom, 0.01),
    }

    uni = uniformity_ks(unfolded)
    uni_entry = uni.to_dict() | {"ks_critical_1pct": ks_critical(m, KS_COEFF_1PCT)}

    criteria = {
        "density_chi_square_1pct": bool(dens_gof.pass_at_1pct),
        "unfolded_ks_1pct": bool(uni.pass_at_1pct),
    }
    spacing_entries = {}
    for k, sample in samples.items():
        rng = config.spacing_range if config.spacing_range is not None else default_spacing_range(k)
        hist = spacing_histogram(sample, config.spacing_bins, rng)
        emit(f"spacing_k{k}.csv", HIST_HEADER, _hist_rows(hist))
        ks = ks_test(sample)
        chi = _safe_chi(hist, len(sample))
        n = len(sample)
        mean = mean_check(sample)
        mean_ok = abs(mean - (k + 1)) <= mean_tolerance(k, n)
        entry = ks.combine(GofReport(chi_square=chi.chi_square, degrees_of_freedom=chi.degrees_of_freedom)).to_dict()
        entry.update(
            k=k,
            range=rng,
            ks_critical_1pct=ks_critical(n, KS_COEFF_1PCT),
            mean_target=k + 1,
            mean_tolerance=mean_tolerance(k, n),
            mean_within_tolerance=mean_ok,
            chi_square_pass_1pct=chi.pass_at_1pct,
            chi_square_note="informational: overlapping gaps (k >= 1) and tied values break the independence the Pearson test assumes",
        )
        spacing_entries[f"k{k}"] = entry
        criteria[f"spacing_k{k}_ks_1pct"] = bool(ks.pass_at_1pct)
        criteria[f"spacing_k{k}_mean"] = bool(mean_ok)

    figures = {"density": dens_entry, "unfolded": uni_entry, "spacing": spacing_entries}
    if config.pair_correlation:
        pc = pair_correlation(unfolded, config.pair_bins, config.pair_range)
        emit("pair_correlation.csv", HIST_HEADER, _hist_rows(pc))
        dev = float(max(abs(d - 1.0) for d in pc.density)) if len(pc.density) else 0.0
        figures["pair_correlation"] = {"bins": config.pair_bins, "range": config.pair_range, "pairs": pc.total, "max_abs_deviation": dev}

    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "config": config.echo(),
        "source": source,
        "sample": {"num_primes": m, "prime_limit": int(primes.limit), "max_prime": max_prime},
        "figures": figures,
        "verification": verification,
        "acceptance": {"all_passed": all(criteria.values()), "criteria": criteria},
        "artifacts": dict(sorted(checksums.items())),
    }
    report = _jsonable(report)
    validate_report(report)
    path = out / "report.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    files["report.json"] = path
    return RunResult(files, report, cache_hit)


def verify(eta: EtaProductSpec | None, curve: CurveSpec | None, n_max: int, cache_dir=None, table=None) -> dict:
    """Hecke consistency, the Deligne bound and (given both sources) oracle agreement.

    ``table`` overrides the eta computation; used to audit an externally
    supplied or deliberately corrupted table.
    """
    primes = sieve(n_max) if n_max >= 2 else []
    result: dict = {"n_max": n_max}
    ok = True
    if table is None and eta is not None:
        table, hit = load_or_compute(eta, n_max, cache_dir)
        result["cache_hit"] = hit
    if table is not None:
        result["label"] = table.label
        mult = check_multiplicativity(table)
        rec = check_all_recursions(table, primes)
        bound = check_deligne_bound(table, primes)
        result["multiplicativity"] = mult.to_dict()
        result["hecke_recursion"] = rec.to_dict()
        result["deligne_bound"] = {"checked_primes": len(primes), "violations": bound}
        result["bad_primes"] = bad_prime_summary(table)
        ok = mult.passed and rec.passed and not bound
    if curve is not None:
        mismatches, checked, hasse = [], 0, []
        for p in primes:
            p = int(p)
            if not curve.has_good_reduction(p):
                continue
            try:
                ap = trace_ap(curve, p)
            except InternalConsistencyError:
                hasse.append(p)
                continue
            checked += 1
            if table is not None and table.values[p - 1] != ap:
                mismatches.append({"prime": p, "eta": table.values[p - 1], "point_count": ap})
        result["cross_check"] = {
            "enabled": table is not None,
            "good_primes_checked": checked,
            "mismatches": mismatches,
            "hasse_violations": hasse,
        }
        ok = ok and not mismatches and not hasse
    result["passed"] = ok
    return _jsonable(result)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "item"):
        return obj.item()
    return obj
