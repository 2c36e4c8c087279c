"""Command line entry point: ``ctunnel run|validate|wkb <config>``.

Exit codes: 0 success, 2 configuration or validation error, 3 numeric
failure (including an unwritable output directory or any flagged point).
"""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigurationError, ContractViolation, NumericFailure
from .sweep import (emit_report, load_config, output_dir, rotation_summary, run_sweep, run_wkb,
                    validate_config)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

log = logging.getLogger("ctunnel")


def _flags(parser, top: bool) -> None:
    # flags are accepted before and after the subcommand; SUPPRESS keeps the
    # subparser from overwriting a value given at top level
    default = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--verbose", action="store_true", default=default(False),
                        help="log progress and write wronskian.csv")
    parser.add_argument("--dump-wkb", action="store_true", default=default(False),
                        help="write WKB quasimode samples per (alpha, h, n)")
    parser.add_argument("--jobs", type=int, default=default(1), metavar="N",
                        help="worker processes for the sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctunnel", description=__doc__.splitlines()[0])
    _flags(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "full sweep: spectra, WKB and gaps"),
                        ("validate", "parse the config and run potential diagnostics"),
                        ("wkb", "WKB-only pipeline")):
        p = sub.add_parser(name, help=help_)
        _flags(p, top=False)
        p.add_argument("config", help="path to a TOML run config or a bundled config name")
    return parser


def _run(args) -> int:
    config = load_config(args.config)
    if args.command == "validate":
        report = validate_config(config)
        for msg in report.messages:
            print(msg)
        print(f"{config.name}: {'ok' if report.passed else 'FAILED'}")
        return EXIT_OK if report.passed else EXIT_CONFIG
    if args.jobs < 1:
        raise ConfigurationError("--jobs must be at least 1")
    if args.command == "run":
        result = run_sweep(config, jobs=args.jobs, dump_wkb=args.dump_wkb)
    else:
        result = run_wkb(config, dump_wkb=args.dump_wkb)
    outdir = output_dir(config)
    paths = emit_report(result, outdir, verbose=args.verbose)
    for path in paths:
        log.info("wrote %s", path)
    if args.command == "run":
        for alpha, c1 in rotation_summary(result).items():
            log.info("alpha=%g: arg(gap) slope %.6f", alpha, c1)
    print(f"{config.name}: {len(result.points)} points -> {outdir}")
    if result.failed:
        bad = [(p.alpha, p.h) for p in result.points
               if any(f.startswith("failed") for f in p.flags)]
        print(f"numeric failure at (alpha, h) = {bad}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConfigurationError, ContractViolation) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
