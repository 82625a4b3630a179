#!/usr/bin/env python3
"""Run the benchmark processes through both dimension routes and print a table.

Fast by default (analytic rank integral + rate-distortion slope); pass
--estimators to add the two Monte Carlo estimators, which takes a few minutes.

Usage:
    python scripts/run_benchmarks.py --out results --seed 7
    python scripts/run_benchmarks.py --estimators
"""

import argparse
import json
import sys
import time
from pathlib import Path

from gaussdim.benchmarks import BENCHMARKS
from gaussdim.estimators import idr_slope_estimate, surrogate_idr_estimate
from gaussdim.ratedist import rd_dimension_estimate
from gaussdim.spectral import FrequencyGrid, rank_integral


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--grid", type=int, default=4096)
    parser.add_argument("--paths", type=int, default=200_000, help="paths for the entropy-slope route")
    parser.add_argument("--estimators", action="store_true", help="also run the Monte Carlo estimators")
    parser.add_argument("--out", help="directory for a JSON summary")
    args = parser.parse_args(argv)

    grid = FrequencyGrid(args.grid)
    rows = []
    header = f"{'model':28s} {'exact':>7s} {'rank':>10s} {'rd-slope':>10s}"
    if args.estimators:
        header += f" {'H-slope':>10s} {'surrogate':>10s}"
    print(header)
    print("-" * len(header))
    for name, (builder, expected) in BENCHMARKS.items():
        model = builder()
        t0 = time.time()
        rank = rank_integral(model, grid).value
        rd = rd_dimension_estimate(model, (1e-2, 1e-4, 1e-6), grid).value
        row = {"model": name, "expected": expected, "rank_integral": rank, "rd_slope": rd}
        line = f"{name:28s} {expected:7.3f} {rank:10.6f} {rd:10.6f}"
        if args.estimators:
            slope = idr_slope_estimate(model, paths=args.paths, seed=args.seed, grid=grid)
            surr = surrogate_idr_estimate(model, paths=200, k=4096, seed=args.seed, grid=grid)
            row.update({
                "entropy_slope": slope.value, "entropy_slope_se": slope.se,
                "surrogate": surr.value, "surrogate_se": surr.se,
            })
            line += f" {slope.value:10.4f} {surr.value:10.4f}"
        row["seconds"] = time.time() - t0
        rows.append(row)
        print(line)

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "benchmarks.json").write_text(json.dumps(rows, indent=2))
        print(f"\nsummary written to {out_dir / 'benchmarks.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
