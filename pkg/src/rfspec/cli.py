"""Command-line front end: ``rfspec {spectrum,g2tau,g2map,dg2map,validate}``."""

from __future__ import annotations

import argparse
import configparser
import json
import sys

from .errors import (
    ConfigError,
    DegenerateExponent,
    DegeneratePoles,
    FallbackFailed,
    GridTooSmall,
    RFSpecError,
    ToleranceNotMet,
)
from .sweep import MODES, RUNNERS, SweepConfig

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_DEGENERATE = 4
EXIT_INTERNAL = 5

# config-file key -> (SweepConfig field, parser)
_FLOATS = lambda s: tuple(float(x) for x in str(s).split(","))  # noqa: E731
_STRS = lambda s: tuple(x.strip() for x in str(s).split(",") if x.strip())  # noqa: E731
KEYS = {
    "v": ("v", float),
    "delta": ("delta", float),
    "gamma": ("gamma", float),
    "gamma_f": ("gamma_f", _FLOATS),
    "grid": ("grid", str),
    "tau_max": ("tau_max", float),
    "pair": ("pairs", _STRS),
    "pairs": ("pairs", _STRS),
    "secular": ("secular", lambda s: str(s).lower() in ("1", "true", "yes", "on")),
    "tol": ("tol", float),
    "cap": ("cap", int),
    "workers": ("workers", int),
    "out": ("out", str),
    "format": ("format", str),
}


def read_config(path, mode):
    """Flatten an INI file: [atom], [filter], [run] then the mode's own section."""
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as f:
            cp.read_file(f)
    except (OSError, configparser.Error) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    out = {}
    for sec in ("atom", "filter", "run", mode):
        if not cp.has_section(sec):
            continue
        for key, raw in cp.items(sec):
            if key not in KEYS:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
            name, conv = KEYS[key]
            try:
                out[name] = conv(raw)
            except ValueError as e:
                raise ConfigError(f"bad value for {key}: {e}") from None
    return out


def build_parser():
    ap = argparse.ArgumentParser(prog="rfspec", description="Filtered correlation functions of resonance fluorescence.")
    sub = ap.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="INI file with [atom]/[filter]/[run]/[%s] sections" % mode)
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--workers", type=int)
        p.add_argument("--v", type=float, help="Rabi frequency")
        p.add_argument("--delta", type=float, help="laser detuning")
        p.add_argument("--gamma", type=float, help="atomic half decay rate (unit of all outputs)")
        p.add_argument("--gamma-f", dest="gamma_f", help="filter half bandwidth(s), comma separated")
        p.add_argument("--tau-max", dest="tau_max", type=float)
        p.add_argument("--grid", help='scan axis "start:stop:count"')
        p.add_argument("--pair", help="line pair(s) such as TT or RR,TF")
        p.add_argument("--tol", type=float)
        p.add_argument("--no-secular", dest="secular", action="store_false", default=None)
    return ap


def config_from_args(args) -> SweepConfig:
    values = read_config(args.config, args.mode) if args.config else {}
    flags = {
        "v": args.v,
        "delta": args.delta,
        "gamma": args.gamma,
        "gamma_f": _FLOATS(args.gamma_f) if args.gamma_f else None,
        "grid": args.grid,
        "tau_max": args.tau_max,
        "pairs": _STRS(args.pair) if args.pair else None,
        "secular": args.secular,
        "tol": args.tol,
        "workers": args.workers,
        "out": args.out,
        "format": args.format,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return SweepConfig(mode=args.mode, **values)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def run(cfg: SweepConfig) -> int:
    if cfg.mode == "validate":
        from .validation import run_battery

        report = run_battery(cfg.tol)
        _emit(json.dumps(report, indent=1) + "\n", cfg.out)
        for c in report["checks"]:
            print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['detail'] or c['achieved']}", file=sys.stderr)
        return EXIT_OK if report["all_passed"] else EXIT_CHECK_FAILED
    grid = RUNNERS[cfg.mode](cfg)
    _emit(grid.to_json() + "\n" if cfg.format == "json" else grid.to_csv(), cfg.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except (ConfigError, GridTooSmall) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ToleranceNotMet as e:
        print(f"tolerance not met: {e}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (DegeneratePoles, DegenerateExponent, FallbackFailed) as e:
        print(f"degenerate case could not be resolved: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except RFSpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
