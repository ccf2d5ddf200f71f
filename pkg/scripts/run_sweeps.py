#!/usr/bin/env python3
"""Run every shipped experiment config and write CSVs under results/.

The two-point Helmholtz sweep is run with both element orderings so the
round-off floors can be compared; the layer experiments also emit a
regular-FEM baseline sweep for the element-count comparison tables.

Usage: python scripts/run_sweeps.py [--only e3_laplace2d] [--outdir results]
"""
import argparse
import pathlib
import sys
from dataclasses import replace

from cfem import bench

FEM_BASELINE_NX = {
    "e3_laplace2d": (16, 32, 64, 128, 256, 512, 1024),
    "e4_helmholtz2d": (32, 64, 128, 256, 512, 1024),
    "e5_multidomain": (16, 32, 64, 128, 256, 512),
    "e6_elastic": (16, 32, 64, 128, 256, 512),
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--only", choices=bench.EXPERIMENT_IDS)
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    experiments = [args.only] if args.only else list(bench.EXPERIMENT_IDS)

    for experiment in experiments:
        config = bench.default_config(experiment)
        records = bench.run_experiment(config)
        if experiment == "e2_helmholtz1d":
            records += bench.run_experiment(
                replace(config, ordering="conjugate_interleaved")
            )
        bench.emit_csv(records, outdir / f"{experiment}.csv")
        print(f"{experiment}: {len(records)} records")
        if experiment in FEM_BASELINE_NX:
            fem = bench.run_regular_sweep(config, FEM_BASELINE_NX[experiment])
            bench.emit_csv(fem, outdir / f"{experiment}_fem.csv")
            for row in bench.compare_baseline(records, fem):
                print(
                    f"  target {row.target:g}: cfem n={row.n_cfem} "
                    f"fem nx={row.nx_fem}"
                )
    return 0


if __name__ == "__main__":
    sys.exit(main())
