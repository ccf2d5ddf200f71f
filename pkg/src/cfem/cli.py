"""Command-line entry point: grid inspection and the six experiment runners.

`cfem <subcommand> [--config file.json] [flags]` writes CSV records to
stdout or --csv. With --assert the run exits with code 2 when any CI
threshold fails. The worker pool honours the CFEM_THREADS env var.
"""
from __future__ import annotations

import argparse
import sys

from . import bench
from .pade_grid import MAX_VALIDATED_ELEMENTS, make_grid, validate_against_table

SUBCOMMAND_EXPERIMENTS = {
    "bvp1d": "e1_elliptic",
    "laplace2d": "e3_laplace2d",
    "helmholtz2d": "e4_helmholtz2d",
    "multidomain": "e5_multidomain",
    "elastic": "e6_elastic",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfem",
        description="Complex-length finite element convergence experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    grid = sub.add_parser("grid", help="print a complex-length grid")
    grid.add_argument("--n", type=int, default=8, help="element count")
    grid.add_argument("--total-length", type=float, default=1.0)
    grid.add_argument(
        "--ordering",
        default="phase_monotone",
        choices=["phase_monotone", "conjugate_interleaved"],
    )
    grid.add_argument(
        "--validate",
        action="store_true",
        help="check the lengths against the embedded reference table",
    )

    for name, experiment in SUBCOMMAND_EXPERIMENTS.items():
        p = sub.add_parser(name, help=f"run the {experiment} sweep")
        p.add_argument("--config", help="JSON config file (defaults built in)")
        p.add_argument("--csv", help="output path (default: stdout)")
        p.add_argument(
            "--assert",
            dest="assert_thresholds",
            action="store_true",
            help="exit 2 when a CI threshold fails",
        )
        p.add_argument(
            "--fem-baseline",
            metavar="NX",
            type=int,
            nargs="*",
            help="also sweep the regular-FEM mesh at these element counts",
        )
        if name == "bvp1d":
            p.add_argument(
                "--helmholtz",
                action="store_true",
                help="run the oscillatory (e2) variant instead of e1",
            )
    return parser


def _cmd_grid(args) -> int:
    grid = make_grid(args.n, args.total_length, args.ordering)
    print(f"# n={grid.n} total_length={grid.total_length} ordering={grid.ordering.value}")
    for j, length in enumerate(grid.lengths):
        print(f"{j},{length.real:.15g},{length.imag:.15g}")
    if args.validate:
        if args.n > MAX_VALIDATED_ELEMENTS:
            print(f"# no reference table beyond n={MAX_VALIDATED_ELEMENTS}")
            return 1
        report = validate_against_table(args.n)
        print(f"# table deviation {report.max_deviation:.3e} "
              f"({'ok' if report.passed else 'FAIL'})")
        return 0 if report.passed else 1
    return 0


def _cmd_experiment(name: str, args) -> int:
    experiment = SUBCOMMAND_EXPERIMENTS[name]
    if name == "bvp1d" and getattr(args, "helmholtz", False):
        experiment = "e2_helmholtz1d"
    if args.config:
        config = bench.ExperimentConfig.load(args.config)
        if config.experiment != experiment:
            print(
                f"config is for {config.experiment}, expected {experiment}",
                file=sys.stderr,
            )
            return 1
    else:
        config = bench.default_config(experiment)

    records = bench.run_experiment(config)
    if args.fem_baseline:
        records = records + bench.run_regular_sweep(config, args.fem_baseline)
    csv_text = bench.format_csv(records)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)

    if args.assert_thresholds:
        checks = bench.check_thresholds(config, records)
        failed = False
        for label, ok in checks:
            print(f"# {'PASS' if ok else 'FAIL'}: {label}", file=sys.stderr)
            failed |= not ok
        if not checks:
            print("# no thresholds apply to this config", file=sys.stderr)
        if failed:
            return 2
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "grid":
        return _cmd_grid(args)
    return _cmd_experiment(args.command, args)


if __name__ == "__main__":
    sys.exit(main())
