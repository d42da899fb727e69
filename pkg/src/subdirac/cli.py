"""Command-line front end: ``subdirac run | dump | list-shapes``."""

from __future__ import annotations

import argparse
import sys

from . import geometry as geo
from .charts import SHAPES
from .errors import CatalogError, ConfigError, SubdiracError
from .suites import SUITES, SuiteConfig, emit_fields, load_config, report_json, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grids(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grids must be comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="subdirac", description="Numerical checks for submanifold Dirac operators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run verification suites and write a JSON report")
    run.add_argument("--suite", choices=SUITES + ("all",), default=None)
    run.add_argument("--config", help="JSON config; flags override its keys")
    run.add_argument("--grids", type=_grids, help="comma-separated grid sizes, e.g. 16,32,64")
    run.add_argument("--jet", choices=("analytic", "finite_difference"), default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", help="report path (default: stdout)")
    run.add_argument("--strict", action="store_true", default=None, help="escalate accuracy warnings to errors")

    dump = sub.add_parser("dump", help="write per-sample fields of a catalog shape as CSV")
    dump.add_argument("--shape", required=True)
    dump.add_argument("--grid", type=int, default=64)
    dump.add_argument("--out", required=True)

    sub.add_parser("list-shapes", help="print the chart catalog")
    return p


def _cmd_run(args) -> int:
    overrides = {"suite": args.suite, "grids": args.grids, "jet": args.jet, "seed": args.seed,
                 "output": args.out, "strict": args.strict}
    if args.config:
        cfg = load_config(args.config, **overrides)
    else:
        cfg = SuiteConfig(**{k: v for k, v in overrides.items() if v is not None})
    report = run_suite(cfg)
    text = report_json(report)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for rec in report["checks"]:
        status = "PASS" if rec["pass"] else "FAIL"
        print(f"{status}  {rec['name']}", file=sys.stderr)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def _cmd_dump(args) -> int:
    if args.grid < 8:
        raise ConfigError(f"grid size must be >= 8, got {args.grid}")
    header = emit_fields(args.shape, args.grid, args.out)
    print(f"wrote {args.out} ({', '.join(header)})", file=sys.stderr)
    return EXIT_PASS


def _cmd_list(args) -> int:
    for name in geo.list_shapes():
        spec = SHAPES[name]
        params = ", ".join(f"{k}={v}" for k, v in spec.defaults.items()) or "-"
        print(f"{name:14s} k={spec.k}  params: {params:24s} {spec.description}")
    return EXIT_PASS


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "dump": _cmd_dump, "list-shapes": _cmd_list}[args.command]
    try:
        return handler(args)
    except (ConfigError, CatalogError) as exc:
        print(f"subdirac: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"subdirac: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SubdiracError as exc:
        print(f"subdirac: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
