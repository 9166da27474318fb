"""Command line entry point: ``trigapprox run|oracle|verify|sweep``."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from ..acsets import contains
from ..dual import SandwichViolation
from ..groups import InvalidInput
from .acceptance import run_suite
from .config import load_config
from .oracle import OracleError, oracle_distance
from .runner import SCHEMA_VERSION, check_sandwich, dumps, format_table, run_all

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SANDWICH = 2


def _write_report(doc: dict, path):
    if path:
        with open(path, "w") as fh:
            fh.write(dumps(doc))


def _finish(doc: dict, args) -> int:
    sys.stdout.write(format_table(doc))
    _write_report(doc, args.report)
    try:
        check_sandwich(doc)
    except SandwichViolation as exc:
        print(f"error: sandwich violation: {exc}", file=sys.stderr)
        return EXIT_SANDWICH
    return EXIT_OK


def cmd_run(args) -> int:
    scenarios = load_config(args.config, args.grid)
    return _finish(run_all(scenarios, args.jobs, args.timings), args)


def cmd_sweep(args) -> int:
    windows = sorted(set(args.windows))
    scenarios = [
        dataclasses.replace(sc, primal_windows=windows, dual_windows=windows)
        for sc in load_config(args.config, args.grid)
    ]
    return _finish(run_all(scenarios, args.jobs, args.timings), args)


def cmd_oracle(args) -> int:
    scenarios = load_config(args.config, args.grid)
    doc = run_all(scenarios, args.jobs, args.timings)
    rows = []
    status = EXIT_OK
    for sc, rep in zip(scenarios, doc["scenarios"]):
        g = sc.group
        if g.kind != "cyclic":
            print(f"{sc.name}: skipped (oracle needs a cyclic group)")
            continue
        mask = [contains(sc.S, x, g) for x in range(g.size)]
        try:
            # atoms on Z_n already live in the density
            val = oracle_distance(g.size, sc.measure.ac.samples, mask, sc.s, sc.k, sc.alpha)
        except OracleError as exc:
            print(f"{sc.name}: oracle unavailable: {exc}", file=sys.stderr)
            status = EXIT_CONFIG
            continue
        sw = rep["sandwich"]
        dev = max(abs(sw["upper"] - val), abs(sw["lower"] - val))
        rep["oracle"] = {"value": val, "max_deviation": dev}
        rows.append(f"{sc.name}: oracle {val:.15f}  primal {sw['upper']:.15f}  dual {sw['lower']:.15f}  dev {dev:.2e}")
    sys.stdout.write(format_table(doc))
    for r in rows:
        print(r)
    _write_report(doc, args.report)
    return status


def cmd_verify(args) -> int:
    results = run_suite(echo=print)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trigapprox",
        description="Upper and lower bounds for weighted trigonometric approximation distances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="scenario file (TOML)")
        p.add_argument("--grid", type=int, default=None, help="override the quadrature grid size")
        p.add_argument("--jobs", type=int, default=1, help="scenarios solved in parallel")
        p.add_argument("--report", default=None, help="write the JSON report here")
        p.add_argument("--timings", action="store_true", help="add wall-clock timings to the report")

    p = sub.add_parser("run", help="solve every scenario in a config")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run with a replacement list of windows")
    common(p)
    p.add_argument("--windows", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="compare cyclic scenarios with brute force")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="run the built-in reference suite")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except InvalidInput as exc:
        # covers config errors and unsupported combinations
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


__all__ = ["main", "build_parser", "SCHEMA_VERSION"]

if __name__ == "__main__":
    sys.exit(main())
