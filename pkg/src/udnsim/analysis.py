"""Density sweeps and what they reveal: critical densities and scaling laws.

A sweep evaluates coverage and potential throughput over an ascending
density grid, one independent sub-seeded Monte Carlo run per row. On top of
that sit the peak finder (where potential throughput stops growing), its
normalization to "expected BSs inside the close-in region", and the log-log
tail fit of the throughput growth exponent.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Dimension
from .montecarlo import (
    CoverageEstimate,
    NetworkScenario,
    derive_seed,
    estimate_sir_ccdf,
    potential_throughput,
)


class InsufficientDataError(ValueError):
    """Raised when a fit is asked for with too few usable sweep rows."""


@dataclass(frozen=True)
class SweepRow:
    density: float  # per km^2 or km^3, matching the scenario geometry
    estimates: tuple[CoverageEstimate, ...]  # one per threshold
    throughput: tuple[float, ...]  # bps/Hz per km^2 (or km^3), one per threshold


@dataclass(frozen=True)
class SweepResult:
    scenario: NetworkScenario  # template; per-row density varies
    thresholds: tuple[float, ...]
    rows: tuple[SweepRow, ...]
    master_seed: int
    fingerprint: str

    def __post_init__(self) -> None:
        dens = [row.density for row in self.rows]
        if any(b <= a for a, b in zip(dens, dens[1:])):
            raise ValueError("sweep rows must have strictly increasing densities")

    def densities(self) -> np.ndarray:
        return np.asarray([row.density for row in self.rows])

    def coverage_column(self, threshold: float) -> np.ndarray:
        j = self._threshold_index(threshold)
        return np.asarray([row.estimates[j].probability for row in self.rows])

    def halfwidth_column(self, threshold: float) -> np.ndarray:
        j = self._threshold_index(threshold)
        return np.asarray([row.estimates[j].ci_halfwidth for row in self.rows])

    def throughput_column(self, threshold: float) -> np.ndarray:
        j = self._threshold_index(threshold)
        return np.asarray([row.throughput[j] for row in self.rows])

    def coverage_peak_density(self, threshold: float) -> float:
        """Density of maximal coverage: where noise stops being the limiter."""
        col = self.coverage_column(threshold)
        return float(self.rows[int(np.argmax(col))].density)

    def _threshold_index(self, threshold: float) -> int:
        for j, t in enumerate(self.thresholds):
            if math.isclose(t, threshold, rel_tol=1e-12):
                return j
        raise KeyError(f"threshold {threshold} not in sweep thresholds {self.thresholds}")


def scenario_fingerprint(scenario: NetworkScenario) -> str:
    blob = json.dumps(scenario.canonical_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def run_density_sweep(
    scenario: NetworkScenario,
    densities: list[float] | tuple[float, ...],
    trials: int,
    seed: int,
    threads: int | None = None,
) -> SweepResult:
    """Coverage and potential throughput across an ascending density grid.

    Row i runs with sub-seed derived from (seed, i), so rows are independent
    and the whole table is reproducible from the master seed alone.
    """
    dens = [float(d) for d in densities]
    if not dens:
        raise ValueError("at least one density is required")
    if any(d <= 0.0 or not math.isfinite(d) for d in dens):
        raise ValueError(f"densities must be positive and finite: {dens}")
    if any(b <= a for a, b in zip(dens, dens[1:])):
        raise ValueError(f"densities must be strictly ascending: {dens}")
    if not scenario.thresholds:
        raise ValueError("scenario must define at least one threshold")

    rows = []
    for i, density in enumerate(dens):
        scen = scenario.with_density(density)
        ests = estimate_sir_ccdf(scen, scenario.thresholds, trials, derive_seed(seed, i), threads)
        pts = tuple(
            potential_throughput(density, t, est.probability)
            for t, est in zip(scenario.thresholds, ests)
        )
        rows.append(SweepRow(density, tuple(ests), pts))
    return SweepResult(
        scenario=scenario,
        thresholds=scenario.thresholds,
        rows=tuple(rows),
        master_seed=seed,
        fingerprint=scenario_fingerprint(scenario),
    )


@dataclass(frozen=True)
class CriticalDensityResult:
    """Where potential throughput peaks, if it does inside the sweep."""

    peak_found: bool
    critical_density: float | None  # per km^2 or km^3
    normalized_value: float | None  # expected BSs inside the close-in region
    fit_window: tuple[float, ...]  # densities used for the local fit
    curvature: float | None  # quadratic coefficient in log10-density


def find_critical_density(sweep: SweepResult, threshold: float) -> CriticalDensityResult:
    """Locate the potential-throughput maximum along the sweep.

    Takes the discrete argmax and refines it with a quadratic in
    log10-density through the argmax and both neighbours. An argmax on
    either end means the data are monotone and no interior peak exists.
    """
    if len(sweep.rows) < 2:
        raise ValueError("sweep needs at least two rows to look for a peak")
    pt = sweep.throughput_column(threshold)
    dens = sweep.densities()
    k = int(np.argmax(pt))
    if k == 0 or k == len(pt) - 1:
        return CriticalDensityResult(False, None, None, (float(dens[k]),), None)

    window = dens[k - 1 : k + 2]
    x = np.log10(window)
    y = pt[k - 1 : k + 2]
    a, b, _ = np.polyfit(x, y, 2)
    if a >= 0.0:  # flat or degenerate triple; fall back to the grid point
        mu_c = float(dens[k])
    else:
        vertex = -b / (2.0 * a)
        vertex = min(max(vertex, x[0]), x[2])
        mu_c = float(10.0**vertex)

    normalized = None
    corner = sweep.scenario.pathloss.corner_distance_m
    if corner is not None:
        normalized = normalized_critical_density(
            mu_c,
            corner,
            sweep.scenario.geometry.dimension,
            density_units=sweep.scenario.density_unit,
        )
    return CriticalDensityResult(True, mu_c, normalized, tuple(float(d) for d in window), float(a))


def normalized_critical_density(
    critical_density: float,
    corner_distance_m: float,
    dimension: Dimension,
    density_units: str = "per_km2",
) -> float:
    """Expected number of BSs inside the close-in region at the critical
    density: pi R^2 mu in 2D, (4 pi / 3) R^3 mu in 3D (half that in 3D+).

    ``density_units`` guards against feeding a planar density to a
    volumetric geometry or vice versa.
    """
    expected = "per_km2" if dimension is Dimension.PLANE_2D else "per_km3"
    if density_units != expected:
        raise ValueError(
            f"density units {density_units!r} do not match {dimension.value} geometry "
            f"(expected {expected!r})"
        )
    if not (math.isfinite(critical_density) and critical_density > 0.0):
        raise ValueError(f"critical density must be positive, got {critical_density}")
    if not (math.isfinite(corner_distance_m) and corner_distance_m > 0.0):
        raise ValueError(f"corner distance must be positive, got {corner_distance_m}")
    r_km = corner_distance_m / 1000.0
    n = dimension.ndim
    return dimension.solid_angle * r_km**n / n * critical_density


def close_in_measure_km(corner_distance_m: float, dimension: Dimension) -> float:
    """Measure (km^2 or km^3) of the close-in region around the user."""
    r_km = corner_distance_m / 1000.0
    n = dimension.ndim
    return dimension.solid_angle * r_km**n / n


def default_tail_cutoff_density(
    scenario: NetworkScenario, min_expected_close_in: float = 10.0
) -> float:
    """Smallest density whose close-in region holds >= the given expected BS
    count; densities below it are outside the asymptotic scaling regime.
    Single-slope models have no close-in region, so no cutoff (0.0)."""
    corner = scenario.pathloss.corner_distance_m
    if corner is None:
        return 0.0
    return min_expected_close_in / close_in_measure_km(corner, scenario.geometry.dimension)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares slope of log potential throughput vs log density."""

    exponent: float
    stderr: float
    rows_used: int
    density_range: tuple[float, float]


def fit_scaling_exponent(
    sweep: SweepResult,
    threshold: float,
    min_density: float | None = None,
) -> ScalingFit:
    """Asymptotic throughput growth exponent from the sweep's dense tail.

    Rows below ``min_density`` (default: close-in region expects >= 10 BSs)
    and rows with zero estimated throughput are excluded. Fewer than four
    usable rows raise ``InsufficientDataError``.
    """
    if min_density is None:
        min_density = default_tail_cutoff_density(sweep.scenario)
    dens = sweep.densities()
    pt = sweep.throughput_column(threshold)
    usable = (dens >= min_density) & (pt > 0.0)
    if int(usable.sum()) < 4:
        raise InsufficientDataError(
            f"need >= 4 usable tail rows (density >= {min_density:g}, throughput > 0); "
            f"got {int(usable.sum())}"
        )
    x = np.log(dens[usable])
    y = np.log(pt[usable])
    n = x.size
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * y) / sxx)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (intercept + slope * x)
    dof = max(n - 2, 1)
    stderr = float(math.sqrt(float(np.sum(resid**2)) / dof / sxx))
    return ScalingFit(
        exponent=slope,
        stderr=stderr,
        rows_used=n,
        density_range=(float(dens[usable].min()), float(dens[usable].max())),
    )
