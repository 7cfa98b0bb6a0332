#!/usr/bin/env python3
"""Propagation-regime boundary table and the exact grid corner reference.

Emits the small-scale interference boundaries for the preset transmitter
classes and the closed-form corner-user SIR of the 3x3 grid (with its
simulated cross-check and cell-size independence column).
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dataclasses import replace

from udnsim import cli
from udnsim.config import parse_config

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for fixture, out_name in (
        ("propagation_regions.json", "propagation_regions.csv"),
        ("grid_example.json", "grid_corner_sir.csv"),
    ):
        config = parse_config((CONFIG_DIR / fixture).read_text())
        status = cli.run(replace(config, output_csv=str(outdir / out_name)))
        if status != 0:
            return status
    return 0


if __name__ == "__main__":
    sys.exit(main())
