#!/usr/bin/env python3
"""Coverage-vs-density sweeps across the close-in exponent suite.

Runs the canonical plane scenario (corner distance 100 m, far exponent 4,
SNR 20 dB at the corner, Rayleigh fading, thresholds -3 and 7 dB) for
close-in exponents straddling the critical value 2, plus a single-slope
control whose coverage should stay flat once noise is negligible. One CSV
per exponent lands in the output directory.
"""
import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from udnsim import cli
from udnsim.config import parse_config

CLOSE_IN_EXPONENTS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)


def build_config(a0: float | None, args) -> dict:
    if a0 is None:  # single-slope control
        pathloss = {"exponents": [4.0]}
        noise = {"sigma2_watts": 0.0}
        name = "coverage_2d_single_slope_4"
    else:
        pathloss = {"exponents": [a0, 4.0], "breakpoints_m": [100.0]}
        noise = {"snr_at_corner_db": 20.0}
        name = f"coverage_2d_close_exp_{str(a0).replace('.', 'p')}"
    return {
        "experiment": "coverage-sweep",
        "seed": args.seed,
        "trials": args.trials,
        "output_csv": str(Path(args.outdir) / f"{name}.csv"),
        "scenario": {
            "geometry": {"dimension": "2d"},
            "pathloss": pathloss,
            "fading": {"kind": "rayleigh"},
            "noise": noise,
            "thresholds_linear": [0.5, 5.0],
        },
        "densities": {
            "log_grid_per_km2": {
                "min": 0.1,
                "max": 3000.0,
                "points_per_decade": args.points_per_decade,
            }
        },
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results", help="directory for the CSVs")
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--points-per-decade", type=int, default=6)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--quick", action="store_true", help="20x fewer trials, coarser grid")
    args = parser.parse_args()
    if args.quick:
        args.trials = max(args.trials // 20, 1000)
        args.points_per_decade = 4
    Path(args.outdir).mkdir(parents=True, exist_ok=True)

    for a0 in (*CLOSE_IN_EXPONENTS, None):
        config = parse_config(json.dumps(build_config(a0, args)))
        if args.threads:
            from dataclasses import replace

            config = replace(config, threads=args.threads)
        status = cli.run(config)
        if status != 0:
            return status
    return 0


if __name__ == "__main__":
    sys.exit(main())
