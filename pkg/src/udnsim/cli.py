"""Command-line front end: run one configured experiment, emit one CSV.

The CSV carries the fully resolved config and its fingerprint as '#'
comments, so any output file can be reproduced byte-for-byte from its own
header. Numbers are written with 17 significant digits (exact double
round-trip) and independent of locale.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    find_critical_density,
    fit_scaling_exponent,
    run_density_sweep,
)
from .config import EXPERIMENTS, ConfigError, RunConfig, parse_config
from .montecarlo import estimate_sir_ccdf
from .propagation import (
    SPEED_OF_LIGHT_M_S,
    fresnel_breakpoint,
    small_scale_boundary,
)
from .sinr import grid_corner_sir, grid_corner_sir_simulated


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _db(linear: float) -> float:
    return 10.0 * math.log10(linear)


def write_csv(path: str, config: RunConfig, columns: list[str], rows: list[list]) -> None:
    lines = [
        f"# udnsim {__version__}",
        f"# experiment: {config.experiment}",
        f"# seed: {config.seed}",
        f"# config: {config.canonical_json()}",
        f"# fingerprint: sha256:{config.fingerprint()}",
        ",".join(columns),
    ]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _run_coverage_sweep(config: RunConfig, with_throughput: bool) -> tuple[list[str], list[list], str]:
    sweep = run_density_sweep(
        config.scenario, config.densities, config.trials, config.seed, config.threads
    )
    unit = config.scenario.density_unit
    columns = [f"density_{unit}", "threshold_db", "coverage", "ci_halfwidth", "trials"]
    if with_throughput:
        columns.append(f"potential_throughput_bps_hz_{unit[4:]}")
    rows = []
    for row in sweep.rows:
        for j, t in enumerate(sweep.thresholds):
            est = row.estimates[j]
            out = [row.density, _db(t), est.probability, est.ci_halfwidth, est.trials]
            if with_throughput:
                out.append(row.throughput[j])
            rows.append(out)
    parts = []
    for t in sweep.thresholds:
        if with_throughput:
            pt = sweep.throughput_column(t)
            k = int(pt.argmax())
            parts.append(f"T={_db(t):.1f}dB peak PT {pt[k]:.4g} at {sweep.rows[k].density:.4g} {unit}")
        else:
            parts.append(f"T={_db(t):.1f}dB peak coverage at {sweep.coverage_peak_density(t):.4g} {unit}")
    return columns, rows, "; ".join(parts)


def _run_ccdf(config: RunConfig) -> tuple[list[str], list[list], str]:
    scen = config.scenario
    ests = estimate_sir_ccdf(scen, scen.thresholds, config.trials, config.seed, config.threads)
    columns = ["threshold_db", "threshold_linear", "ccdf", "ci_halfwidth", "trials"]
    rows = [[_db(t), t, e.probability, e.ci_halfwidth, e.trials] for t, e in zip(scen.thresholds, ests)]
    summary = (
        f"ccdf at density {scen.density:.4g} {scen.density_unit}: "
        f"P(>{_db(scen.thresholds[0]):.1f}dB)={ests[0].probability:.4f}, "
        f"P(>{_db(scen.thresholds[-1]):.1f}dB)={ests[-1].probability:.4f}"
    )
    return columns, rows, summary


def _run_grid_example(config: RunConfig) -> tuple[list[str], list[list], str]:
    example = config.grid_example
    columns = [
        "alpha",
        "noise_term",
        "sir_closed_form",
        "sir_simulated",
        "closed_vs_sim_rel_err",
        "r_independence_max_rel_spread",
    ]
    rows = []
    parts = []
    for alpha in example.alphas:
        closed = grid_corner_sir(alpha, example.noise_term)
        sims = [grid_corner_sir_simulated(r, alpha, example.noise_term) for r in example.half_cells_m]
        rel_err = abs(sims[0] - closed) / closed
        spread = (max(sims) - min(sims)) / closed
        rows.append([alpha, example.noise_term, closed, sims[0], rel_err, spread])
        parts.append(f"alpha={alpha:g}: SIR={closed:.5f}")
    return columns, rows, "; ".join(parts)


def _run_regions_table(config: RunConfig) -> tuple[list[str], list[list], str]:
    columns = [
        "transmitter_type",
        "frequency_hz",
        "wavelength_m",
        "transmit_height_m",
        "receive_height_m",
        "fluctuation_distance_m",
        "small_scale_boundary_m",
        "fresnel_breakpoint_m",
    ]
    rows = []
    for row in config.region_rows:
        cfg = row.config()
        rows.append(
            [
                row.name,
                row.frequency_hz,
                SPEED_OF_LIGHT_M_S / row.frequency_hz,
                row.transmit_height_m,
                row.receive_height_m,
                row.fluctuation_distance_m,
                small_scale_boundary(cfg),
                fresnel_breakpoint(cfg),
            ]
        )
    return columns, rows, f"{len(rows)} transmitter configurations"


def _run_critical_density(config: RunConfig) -> tuple[list[str], list[list], str]:
    sweep = run_density_sweep(
        config.scenario, config.densities, config.trials, config.seed, config.threads
    )
    unit = config.scenario.density_unit
    columns = [
        "threshold_db",
        "peak_found",
        f"critical_density_{unit}",
        "normalized_critical_density",
        "fit_curvature_log10",
        "trials",
    ]
    rows = []
    parts = []
    for t in sweep.thresholds:
        res = find_critical_density(sweep, t)
        rows.append(
            [_db(t), res.peak_found, res.critical_density, res.normalized_value, res.curvature, config.trials]
        )
        if res.peak_found:
            norm = f", normalized {res.normalized_value:.3g}" if res.normalized_value else ""
            parts.append(f"T={_db(t):.1f}dB: critical density {res.critical_density:.4g} {unit}{norm}")
        else:
            parts.append(f"T={_db(t):.1f}dB: no interior peak")
    return columns, rows, "; ".join(parts)


def _run_scaling_exponent(config: RunConfig) -> tuple[list[str], list[list], str]:
    sweep = run_density_sweep(
        config.scenario, config.densities, config.trials, config.seed, config.threads
    )
    unit = config.scenario.density_unit
    columns = [
        "threshold_db",
        "exponent",
        "stderr",
        "rows_used",
        f"tail_min_density_{unit}",
        f"tail_max_density_{unit}",
        "trials",
    ]
    rows = []
    parts = []
    for t in sweep.thresholds:
        fit = fit_scaling_exponent(sweep, t, config.tail_min_density)
        rows.append(
            [_db(t), fit.exponent, fit.stderr, fit.rows_used, *fit.density_range, config.trials]
        )
        parts.append(f"T={_db(t):.1f}dB: exponent {fit.exponent:.3f} +- {fit.stderr:.3f}")
    return columns, rows, "; ".join(parts)


def run(config: RunConfig) -> int:
    """Execute one experiment and write its CSV; returns a process exit code."""
    if config.experiment == "coverage-sweep":
        columns, rows, summary = _run_coverage_sweep(config, with_throughput=False)
    elif config.experiment == "throughput-sweep":
        columns, rows, summary = _run_coverage_sweep(config, with_throughput=True)
    elif config.experiment == "ccdf":
        columns, rows, summary = _run_ccdf(config)
    elif config.experiment == "grid-example":
        columns, rows, summary = _run_grid_example(config)
    elif config.experiment == "regions-table":
        columns, rows, summary = _run_regions_table(config)
    elif config.experiment == "critical-density":
        columns, rows, summary = _run_critical_density(config)
    elif config.experiment == "scaling-exponent":
        columns, rows, summary = _run_scaling_exponent(config)
    else:  # pragma: no cover - parse_config already rejects this
        raise ConfigError(f"unknown experiment {config.experiment!r}")
    write_csv(config.output_csv, config, columns, rows)
    print(f"{config.experiment}: {summary}")
    print(f"wrote {config.output_csv}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udnsim",
        description="Monte Carlo densification experiments: coverage, throughput, and propagation regimes.",
    )
    parser.add_argument("--version", action="version", version=f"udnsim {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument(
            "--config",
            required=(name != "regions-table"),
            help="path to the JSON experiment config",
        )
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--trials", type=int, help="override the trial count")
        p.add_argument("--out", help="override the output CSV path")
        p.add_argument("--threads", type=int, help="worker processes (results are thread-count independent)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else "{}"
        config = parse_config(text, experiment=args.experiment)
        overrides = {}
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be >= 0")
            overrides["seed"] = args.seed
        if args.trials is not None:
            if args.trials < 1:
                raise ConfigError("--trials must be >= 1")
            overrides["trials"] = args.trials
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be >= 1")
            overrides["threads"] = args.threads
        if args.out is not None:
            overrides["output_csv"] = args.out
        if overrides:
            from dataclasses import replace

            config = replace(config, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        return run(config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
