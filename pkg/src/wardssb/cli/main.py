"""``wardssb`` command line.

Exit codes: 0 all asserted checks pass, 1 a check failed, 2 bad
configuration or unwritable output, 3 capacity or solver failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from ..errors import CapacityError, ConfigError, SolverError
from .config import parse_config
from .suites import emit_tables, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3
COMMANDS = {"check-we": "we-check", "ward": "ward", "spectrum": "spectrum", "sweep": "sweep", "all": "all"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides output.dir)")
    common.add_argument("--tolerance", type=float, metavar="TOL",
                        help="override the tolerance for exact identities")
    common.add_argument("--assert-oracle", type=float, metavar="BOUND",
                        help="assert the exact-diagonalization oracle within BOUND")
    parser = argparse.ArgumentParser(prog="wardssb", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"run the {COMMANDS[name]} suite")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = ""
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config!r}: {exc.strerror}") from exc
        cfg = parse_config(text)
        if args.tolerance is not None:
            if not args.tolerance > 0:
                raise ConfigError(f"--tolerance must be > 0, got {args.tolerance}")
            cfg = replace(cfg, tolerance=replace(cfg.tolerance, identity=args.tolerance))
        if args.assert_oracle is not None and not args.assert_oracle > 0:
            raise ConfigError(f"--assert-oracle must be > 0, got {args.assert_oracle}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    suite = COMMANDS[args.command] if args.command else cfg.suite
    try:
        result = run_suite(cfg, suite, assert_oracle=args.assert_oracle)
    except (CapacityError, SolverError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CAPACITY

    out = args.out or cfg.output_dir
    try:
        emit_tables(result, out, suite)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    failed = [r.check for r in result.rows if r.asserted and not r.passed]
    print(f"{suite}: {len(result.rows)} rows, {len(failed)} failed -> {out}")
    for name in failed:
        print(f"  FAIL {name}")
    return result.exit_code
