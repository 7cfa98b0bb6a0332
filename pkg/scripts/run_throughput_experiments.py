#!/usr/bin/env python3
"""Potential-throughput sweeps, critical densities, and scaling exponents.

Covers the plane and full 3D space for the close-in exponents where the
interesting transitions live: throughput peaks (critical density) for
exponents below the per-dimension critical value, near-saturation at
moderate targets, and the sublinear tail growth exponent 2 - 2/a0 in 2D.
"""
import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from udnsim import cli
from udnsim.config import parse_config


def sweep_config(args, *, name, dimension, a0, corner_m, unit, dmin, dmax, experiment,
                 thresholds=(0.5, 5.0), sigma2=None, trials=None):
    noise = {"sigma2_watts": sigma2} if sigma2 is not None else {"snr_at_corner_db": 20.0}
    return {
        "experiment": experiment,
        "seed": args.seed,
        "trials": trials or args.trials,
        "output_csv": str(Path(args.outdir) / f"{name}.csv"),
        "scenario": {
            "geometry": {"dimension": dimension},
            "pathloss": {"exponents": [a0, 4.0], "breakpoints_m": [corner_m]},
            "fading": {"kind": "rayleigh"},
            "noise": noise,
            "thresholds_linear": list(thresholds),
        },
        "densities": {
            f"log_grid_{unit}": {
                "min": dmin,
                "max": dmax,
                "points_per_decade": args.points_per_decade,
            }
        },
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results")
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=2)
    parser.add_argument("--points-per-decade", type=int, default=6)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()
    if args.quick:
        args.trials = max(args.trials // 20, 1000)
        args.points_per_decade = 4
    Path(args.outdir).mkdir(parents=True, exist_ok=True)

    jobs = [
        # throughput vs density, plane and space
        sweep_config(args, name="throughput_2d_close_exp_1", dimension="2d", a0=1.0,
                     corner_m=100.0, unit="per_km2", dmin=0.1, dmax=1e5,
                     experiment="throughput-sweep"),
        sweep_config(args, name="throughput_2d_close_exp_0p5", dimension="2d", a0=0.5,
                     corner_m=100.0, unit="per_km2", dmin=0.1, dmax=1e5,
                     experiment="throughput-sweep"),
        sweep_config(args, name="throughput_3d_close_exp_1", dimension="3d", a0=1.0,
                     corner_m=100.0, unit="per_km3", dmin=0.1, dmax=2000.0,
                     experiment="throughput-sweep"),
        sweep_config(args, name="throughput_3d_close_exp_2", dimension="3d", a0=2.0,
                     corner_m=100.0, unit="per_km3", dmin=0.1, dmax=2000.0,
                     experiment="throughput-sweep"),
        # where the throughput peaks, normalized to close-in BS count
        sweep_config(args, name="critical_density_2d_close_exp_0p667", dimension="2d",
                     a0=2.0 / 3.0, corner_m=20.0, unit="per_km2", dmin=100.0, dmax=3e4,
                     experiment="critical-density", trials=3 * args.trials),
        sweep_config(args, name="critical_density_2d_close_exp_1", dimension="2d",
                     a0=1.0, corner_m=20.0, unit="per_km2", dmin=100.0, dmax=3e4,
                     experiment="critical-density", trials=3 * args.trials),
        # tail growth exponent, interference-limited
        sweep_config(args, name="scaling_2d_close_exp_1p5", dimension="2d", a0=1.5,
                     corner_m=100.0, unit="per_km2", dmin=100.0, dmax=1e5,
                     experiment="scaling-exponent", thresholds=(1.0,), sigma2=0.0,
                     trials=args.trials // 2),
    ]
    for job in jobs:
        config = parse_config(json.dumps(job))
        if args.threads:
            config = replace(config, threads=args.threads)
        status = cli.run(config)
        if status != 0:
            return status
    return 0


if __name__ == "__main__":
    sys.exit(main())
