"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 verification failure,
3 statistical acceptance failure (only with --strict-stats), 4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from pathlib import Path

from .cache import CACHE_ENV, cache_path, default_cache_dir, load_or_compute, write_table
from .curves import CurveSpec
from .errors import (
    BoundViolationError,
    ConfigError,
    CrossCheckError,
    DomainError,
    EmptyRangeError,
    EmptySeriesError,
    IndexRangeError,
    InsufficientSampleError,
    InternalConsistencyError,
    InvalidSpecError,
    UnderSampledError,
)
from .eta import EtaProductSpec, check_deligne_bound, eta_product
from .pipeline import RunConfig, run_pipeline, verify
from .presets import PRESETS, get_preset
from .primes import sieve

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_STATS, EXIT_IO = 0, 1, 2, 3, 4

log = logging.getLogger("stspacing")

RUN_KEYS = {
    "preset": str,
    "eta": str,
    "bad_primes": str,
    "curve": str,
    "conductor": int,
    "cross_check": "bool",
    "num_primes": int,
    "prime_limit": int,
    "k": str,
    "bins": int,
    "spacing_bins": int,
    "spacing_range": float,
    "pair_correlation": "bool",
    "pair_bins": int,
    "pair_range": float,
    "out": str,
    "cache": str,
    "strict_stats": "bool",
}


def parse_int_list(text: str, field: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise ConfigError(field, f"expected comma-separated integers, got {text!r}") from None


def parse_eta(text: str, bad_primes: str | None = None) -> EtaProductSpec:
    factors = []
    for item in text.replace(" ", "").split(","):
        try:
            m, e = item.split(":")
            factors.append((int(m), int(e)))
        except ValueError:
            raise ConfigError("eta", f"factor {item!r} is not dilation:exponent") from None
    bad = None if bad_primes is None else frozenset(parse_int_list(bad_primes, "bad_primes"))
    return EtaProductSpec(tuple(factors), bad_primes=bad)


def parse_curve(text: str, conductor: int | None) -> CurveSpec:
    coeffs = parse_int_list(text, "curve")
    if len(coeffs) != 5:
        raise ConfigError("curve", "need five coefficients a1,a2,a3,a4,a6")
    if conductor is None:
        raise ConfigError("conductor", "a curve needs its conductor")
    return CurveSpec(*coeffs, conductor=conductor)


def read_config_file(path) -> dict:
    """Flat key = value settings under a [run] section."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc)) from None
    if not parser.has_section("run"):
        raise ConfigError("config", "missing [run] section")
    out = {}
    for key, raw in parser.items("run"):
        if key not in RUN_KEYS:
            raise ConfigError(key, "unknown configuration key")
        kind = RUN_KEYS[key]
        try:
            out[key] = parser.getboolean("run", key) if kind == "bool" else kind(raw)
        except ValueError:
            raise ConfigError(key, f"bad value {raw!r}") from None
    return out


def _source_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("coefficient source")
    g.add_argument("--preset", choices=sorted(PRESETS), help="one of the built-in examples")
    g.add_argument("--eta", help="eta product as dilation:exponent pairs, e.g. 1:2,11:2")
    g.add_argument("--bad-primes", help="comma-separated bad primes of the eta product")
    g.add_argument("--curve", help="Weierstrass coefficients a1,a2,a3,a4,a6 (use --curve=... for a leading minus)")
    g.add_argument("--conductor", type=int)


def _cache_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cache", help=f"coefficient cache directory (default ${CACHE_ENV} or ~/.cache/stspacing)")
    p.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")


def _run_args(p: argparse.ArgumentParser) -> None:
    sz = p.add_mutually_exclusive_group()
    sz.add_argument("--num-primes", type=int)
    sz.add_argument("--prime-limit", type=int)
    p.add_argument("--k", help="spacing orders, comma separated (default 0,1,2)")
    p.add_argument("--bins", type=int, help="angle histogram bins (default 40)")
    p.add_argument("--spacing-bins", type=int, help="spacing histogram bins (default 50)")
    p.add_argument("--spacing-range", type=float, help="upper edge of the spacing histograms (default 6, or 8 for k >= 2)")
    p.add_argument("--pair-correlation", action="store_true", default=None, help="also emit pair_correlation.csv")
    p.add_argument("--pair-bins", type=int)
    p.add_argument("--pair-range", type=float)
    p.add_argument("--no-cross-check", dest="cross_check", action="store_false", default=None)
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--strict-stats", action="store_true", default=None, help="exit 3 when a statistical criterion fails")
    _cache_args(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stspacing",
        description="Sato-Tate angles of cusp-form coefficients and their nearest-neighbour spacing statistics.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="compute (or load) a coefficient table and print its head")
    _source_args(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--method", choices=["auto", "residue", "exact"], default="auto")
    _cache_args(p)

    p = sub.add_parser("verify", help="Hecke consistency, bounds and point-count cross-check")
    _source_args(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--inject", metavar="N:DELTA", help="add DELTA to a_N before checking (fault injection)")
    _cache_args(p)

    p = sub.add_parser("run", help="full pipeline; writes CSV plot data and report.json")
    p.add_argument("--config", help="flat key = value file with a [run] section")
    _source_args(p)
    _run_args(p)

    p = sub.add_parser("preset", help="run the pipeline for a built-in example")
    p.add_argument("name", choices=sorted(PRESETS))
    _run_args(p)
    return parser


def _cache_dir(args, settings=None):
    if getattr(args, "no_cache", False):
        return None
    value = getattr(args, "cache", None) or (settings or {}).get("cache")
    return Path(value) if value else default_cache_dir()


def _resolve_source(settings: dict, require_eta: bool = False):
    eta = curve = None
    if settings.get("preset"):
        try:
            preset = get_preset(settings["preset"])
        except KeyError as exc:
            raise ConfigError("preset", str(exc)) from None
        eta, curve = preset.eta, preset.curve
    if settings.get("eta"):
        eta = parse_eta(settings["eta"], settings.get("bad_primes"))
    if settings.get("curve"):
        curve = parse_curve(settings["curve"], settings.get("conductor"))
    if eta is None and (require_eta or curve is None):
        raise ConfigError("source", "give --preset, --eta or --curve")
    return eta, curve


def _args_to_settings(args) -> dict:
    keys = ["preset", "eta", "bad_primes", "curve", "conductor", "cross_check", "num_primes", "prime_limit",
            "k", "bins", "spacing_bins", "spacing_range", "pair_correlation", "pair_bins", "pair_range",
            "out", "cache", "strict_stats"]
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def build_run_config(settings: dict, cache_dir) -> tuple[RunConfig, bool]:
    eta, curve = _resolve_source(settings)
    num_primes = settings.get("num_primes")
    prime_limit = settings.get("prime_limit")
    if num_primes is not None and prime_limit is not None:
        raise ConfigError("num_primes", "set only one of num_primes / prime_limit")
    if num_primes is None and prime_limit is None:
        if not settings.get("preset"):
            raise ConfigError("num_primes", "set num_primes or prime_limit")
        num_primes = get_preset(settings["preset"]).num_primes
    config = RunConfig(eta=eta, curve=curve, num_primes=num_primes, prime_limit=prime_limit, cache_dir=cache_dir)
    if "k" in settings:
        config.k_list = parse_int_list(settings["k"], "k")
    for key in ("bins", "spacing_bins", "spacing_range", "pair_correlation", "pair_bins", "pair_range", "cross_check"):
        if key in settings:
            setattr(config, key, settings[key])
    config.output_dir = Path(settings.get("out", "out"))
    return config, bool(settings.get("strict_stats", False))


def cmd_coeffs(args) -> int:
    eta, _ = _resolve_source(_args_to_settings(args), require_eta=True)
    if args.n_max < 1:
        raise IndexRangeError("--n-max must be positive")
    cache_dir = _cache_dir(args)
    if args.method != "auto" or cache_dir is None:
        table, hit = eta_product(eta, args.n_max, method=args.method), False
        if cache_dir is not None:
            write_table(cache_path(cache_dir, eta.label, args.n_max), table, eta)
    else:
        table, hit = load_or_compute(eta, args.n_max, cache_dir)
    print(f"source: {eta.describe()} (weight {table.weight}, label {eta.label})")
    head = table.values[:10]
    print("coefficients: " + " ".join(str(a) for a in head))
    primes = sieve(args.n_max) if args.n_max >= 2 else []
    bad = check_deligne_bound(table, primes)
    print(f"bound check: {len(primes)} primes, {len(bad)} violations")
    if cache_dir is not None:
        print(f"cache: {'hit' if hit else 'miss'} {cache_path(cache_dir, eta.label, args.n_max)}")
    return EXIT_VERIFY if bad else EXIT_OK


def cmd_verify(args) -> int:
    eta, curve = _resolve_source(_args_to_settings(args))
    if args.n_max < 1:
        raise IndexRangeError("--n-max must be positive")
    cache_dir = _cache_dir(args)
    table = None
    if args.inject:
        if eta is None:
            raise ConfigError("inject", "fault injection needs an eta product")
        n, delta = (int(x) for x in args.inject.split(":"))
        table, _ = load_or_compute(eta, args.n_max, cache_dir)
        table = table.with_value(n, table[n] + delta)
    result = verify(eta, curve, args.n_max, cache_dir, table=table)
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK if result["passed"] else EXIT_VERIFY


def _do_run(settings: dict, args) -> int:
    config, strict = build_run_config(settings, _cache_dir(args, settings))
    result = run_pipeline(config)
    for name, ok in result.report["acceptance"]["criteria"].items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"wrote {len(result.files)} files to {config.output_dir}")
    if strict and not result.stats_passed:
        return EXIT_STATS
    return EXIT_OK


def cmd_run(args) -> int:
    settings = read_config_file(args.config) if args.config else {}
    settings.update(_args_to_settings(args))
    return _do_run(settings, args)


def cmd_preset(args) -> int:
    settings = _args_to_settings(args)
    settings["preset"] = args.name
    return _do_run(settings, args)


COMMANDS = {"coeffs": cmd_coeffs, "verify": cmd_verify, "run": cmd_run, "preset": cmd_preset}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (
        ConfigError,
        InvalidSpecError,
        InsufficientSampleError,
        EmptyRangeError,
        EmptySeriesError,
        IndexRangeError,
        UnderSampledError,
        DomainError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CrossCheckError, BoundViolationError, InternalConsistencyError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
