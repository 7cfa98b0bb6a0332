"""Strict JSON experiment configuration.

One config file fully describes one run. Keys carry explicit unit suffixes
(_m, _w, _db, _per_km2 ...) because unit slips are the classic failure mode
in propagation studies. Unknown keys are rejected with the offending path,
and every resolved default is echoed back out, so an emitted CSV header is
itself a valid config that reproduces the file.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .channel import FadingModel, NoiseSpec
from .geometry import DeploymentGeometry, Dimension
from .montecarlo import DEFAULT_TRIALS, DEFAULT_WINDOW_TAIL_TOL, NetworkScenario
from .propagation import REGION_TABLE_PRESETS, RegionTableRow

EXPERIMENTS = (
    "coverage-sweep",
    "throughput-sweep",
    "ccdf",
    "grid-example",
    "regions-table",
    "critical-density",
    "scaling-exponent",
)
_SWEEP_EXPERIMENTS = ("coverage-sweep", "throughput-sweep", "critical-density", "scaling-exponent")
_SCENARIO_EXPERIMENTS = _SWEEP_EXPERIMENTS + ("ccdf",)

_DIMENSIONS = {d.value: d for d in Dimension}


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending field path."""


def _require_mapping(obj, path: str, allowed: tuple[str, ...]) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key (allowed: {', '.join(sorted(allowed))})")
    return obj


_MISSING = object()


def _pop(obj: dict, key: str, path: str, default=_MISSING):
    if key in obj:
        return obj[key]
    if default is _MISSING:
        raise ConfigError(f"{path}.{key}: required key is missing")
    return default


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ConfigError(f"{path}: must be finite, got {value!r}")
    return float(value)


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _as_number_list(value, path: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a non-empty list of numbers")
    return [_as_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _as_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a string, got {value!r}")
    return value


@dataclass(frozen=True)
class GridExampleSpec:
    alphas: tuple[float, ...] = (4.0,)
    noise_term: float = 0.0
    half_cells_m: tuple[float, ...] = (50.0, 100.0, 200.0)


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved experiment: scenario, grid, seeds, and output."""

    experiment: str
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    threads: int | None = None
    output_csv: str = ""
    scenario: NetworkScenario | None = None
    densities: tuple[float, ...] | None = None
    grid_example: GridExampleSpec | None = None
    region_rows: tuple[RegionTableRow, ...] = REGION_TABLE_PRESETS
    tail_min_density: float | None = None

    def canonical_dict(self) -> dict:
        """Everything that determines the run's numbers (not where they go:
        output path and thread count are excluded so identical science gives
        identical fingerprints)."""
        out: dict = {"experiment": self.experiment, "seed": self.seed, "trials": self.trials}
        if self.scenario is not None:
            out["scenario"] = self.scenario.canonical_dict()
        if self.densities is not None:
            unit = self.scenario.density_unit
            out["densities"] = {f"list_{unit}": list(self.densities)}
        if self.experiment == "grid-example":
            g = self.grid_example
            out["grid"] = {
                "alphas": list(g.alphas),
                "noise_term": g.noise_term,
                "half_cells_m": list(g.half_cells_m),
            }
        if self.experiment == "regions-table":
            out["regions"] = {
                "rows": [
                    {
                        "name": r.name,
                        "frequency_hz": r.frequency_hz,
                        "transmit_height_m": r.transmit_height_m,
                        "receive_height_m": r.receive_height_m,
                        "fluctuation_distance_m": r.fluctuation_distance_m,
                    }
                    for r in self.region_rows
                ]
            }
        if self.experiment == "scaling-exponent" and self.tail_min_density is not None:
            unit = self.scenario.density_unit
            out[f"tail_min_density_{unit}"] = self.tail_min_density
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def _parse_geometry(obj, path: str) -> DeploymentGeometry:
    obj = _require_mapping(obj, path, ("dimension", "window_radius_m"))
    dim_s = _as_str(_pop(obj, "dimension", path), f"{path}.dimension")
    if dim_s not in _DIMENSIONS:
        raise ConfigError(f"{path}.dimension: expected one of {sorted(_DIMENSIONS)}, got {dim_s!r}")
    radius = _pop(obj, "window_radius_m", path, None)
    if radius is not None:
        radius = _as_number(radius, f"{path}.window_radius_m")
        if radius <= 0.0:
            raise ConfigError(f"{path}.window_radius_m: must be positive, got {radius}")
    return DeploymentGeometry(_DIMENSIONS[dim_s], radius)


def _parse_pathloss(obj, path: str):
    from .propagation import PathLossModel

    obj = _require_mapping(obj, path, ("exponents", "breakpoints_m", "reference_gain"))
    exps = _as_number_list(_pop(obj, "exponents", path), f"{path}.exponents")
    bps_raw = _pop(obj, "breakpoints_m", path, [])
    bps = [] if bps_raw == [] else _as_number_list(bps_raw, f"{path}.breakpoints_m")
    ref = _as_number(_pop(obj, "reference_gain", path, 1.0), f"{path}.reference_gain")
    try:
        return PathLossModel(tuple(exps), tuple(bps), ref)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_fading(obj, path: str) -> FadingModel:
    obj = _require_mapping(obj, path, ("kind", "nakagami_m"))
    kind = _as_str(_pop(obj, "kind", path), f"{path}.kind")
    m = obj.get("nakagami_m")
    if m is not None:
        m = _as_number(m, f"{path}.nakagami_m")
    try:
        return FadingModel(kind, m)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_noise(obj, path: str) -> NoiseSpec:
    obj = _require_mapping(obj, path, ("sigma2_watts", "snr_at_corner_db"))
    sigma2 = obj.get("sigma2_watts")
    snr = obj.get("snr_at_corner_db")
    if (sigma2 is None) == (snr is None):
        raise ConfigError(f"{path}: exactly one of sigma2_watts / snr_at_corner_db must be set")
    try:
        if sigma2 is not None:
            return NoiseSpec.absolute(_as_number(sigma2, f"{path}.sigma2_watts"))
        return NoiseSpec.snr_at_corner(_as_number(snr, f"{path}.snr_at_corner_db"))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_thresholds(obj: dict, path: str) -> tuple[float, ...]:
    has_db = "thresholds_db" in obj
    has_lin = "thresholds_linear" in obj
    if has_db == has_lin:
        raise ConfigError(f"{path}: exactly one of thresholds_db / thresholds_linear must be set")
    if has_db:
        vals = _as_number_list(obj["thresholds_db"], f"{path}.thresholds_db")
        lin = [10.0 ** (v / 10.0) for v in vals]
        key = "thresholds_db"
    else:
        lin = _as_number_list(obj["thresholds_linear"], f"{path}.thresholds_linear")
        key = "thresholds_linear"
    if any(b <= a for a, b in zip(lin, lin[1:])):
        raise ConfigError(f"{path}.{key}: thresholds must be strictly ascending")
    if any(t <= 0.0 for t in lin):
        raise ConfigError(f"{path}.{key}: thresholds must be positive")
    return tuple(lin)


_SCENARIO_KEYS = (
    "geometry",
    "pathloss",
    "fading",
    "noise",
    "transmit_power_w",
    "thresholds_db",
    "thresholds_linear",
    "density_per_km2",
    "density_per_km3",
    "window_tail_tol",
)


def _parse_scenario(obj, path: str) -> NetworkScenario:
    obj = _require_mapping(obj, path, _SCENARIO_KEYS)
    geometry = _parse_geometry(_pop(obj, "geometry", path), f"{path}.geometry")
    pathloss = _parse_pathloss(_pop(obj, "pathloss", path), f"{path}.pathloss")
    fading = _parse_fading(_pop(obj, "fading", path, {"kind": "rayleigh"}), f"{path}.fading")
    noise = _parse_noise(_pop(obj, "noise", path), f"{path}.noise")
    power = _as_number(_pop(obj, "transmit_power_w", path, 1.0), f"{path}.transmit_power_w")
    thresholds = _parse_thresholds(obj, path)
    tol = _as_number(
        _pop(obj, "window_tail_tol", path, DEFAULT_WINDOW_TAIL_TOL), f"{path}.window_tail_tol"
    )

    unit = "per_km2" if geometry.dimension is Dimension.PLANE_2D else "per_km3"
    wrong = "density_per_km3" if unit == "per_km2" else "density_per_km2"
    if obj.get(wrong) is not None:
        raise ConfigError(
            f"{path}.{wrong}: unit does not match {geometry.dimension.value} geometry "
            f"(use density_{unit})"
        )
    density = obj.get(f"density_{unit}")
    density = 0.0 if density is None else _as_number(density, f"{path}.density_{unit}")

    try:
        return NetworkScenario(
            geometry=geometry,
            density=density,
            pathloss=pathloss,
            fading=fading,
            noise=noise,
            transmit_power_w=power,
            thresholds=thresholds,
            window_tail_tol=tol,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_densities(obj, path: str, unit: str) -> tuple[float, ...]:
    wrong = "per_km3" if unit == "per_km2" else "per_km2"
    allowed = (f"list_{unit}", f"log_grid_{unit}", f"list_{wrong}", f"log_grid_{wrong}")
    obj = _require_mapping(obj, path, allowed)
    for key in (f"list_{wrong}", f"log_grid_{wrong}"):
        if key in obj:
            raise ConfigError(f"{path}.{key}: unit does not match the scenario geometry (use _{unit})")
    has_list = f"list_{unit}" in obj
    has_grid = f"log_grid_{unit}" in obj
    if has_list == has_grid:
        raise ConfigError(f"{path}: exactly one of list_{unit} / log_grid_{unit} must be set")
    if has_list:
        dens = _as_number_list(obj[f"list_{unit}"], f"{path}.list_{unit}")
    else:
        gpath = f"{path}.log_grid_{unit}"
        grid = _require_mapping(obj[f"log_grid_{unit}"], gpath, ("min", "max", "points_per_decade"))
        lo = _as_number(_pop(grid, "min", gpath), f"{gpath}.min")
        hi = _as_number(_pop(grid, "max", gpath), f"{gpath}.max")
        ppd = _as_number(_pop(grid, "points_per_decade", gpath), f"{gpath}.points_per_decade")
        if not 0.0 < lo < hi:
            raise ConfigError(f"{gpath}: need 0 < min < max")
        if ppd <= 0.0:
            raise ConfigError(f"{gpath}.points_per_decade: must be positive")
        n = int(round(math.log10(hi / lo) * ppd)) + 1
        dens = [float(v) for v in np.geomspace(lo, hi, max(n, 2))]
    if any(d <= 0.0 for d in dens):
        raise ConfigError(f"{path}: densities must be positive")
    if any(b <= a for a, b in zip(dens, dens[1:])):
        raise ConfigError(f"{path}: densities must be strictly ascending")
    return tuple(dens)


def _parse_grid_example(obj, path: str) -> GridExampleSpec:
    obj = _require_mapping(obj, path, ("alphas", "noise_term", "half_cells_m"))
    alphas = _as_number_list(_pop(obj, "alphas", path, [4.0]), f"{path}.alphas")
    noise_term = _as_number(_pop(obj, "noise_term", path, 0.0), f"{path}.noise_term")
    cells = _as_number_list(
        _pop(obj, "half_cells_m", path, [50.0, 100.0, 200.0]), f"{path}.half_cells_m"
    )
    if any(a <= 0.0 for a in alphas):
        raise ConfigError(f"{path}.alphas: must be positive")
    if noise_term < 0.0:
        raise ConfigError(f"{path}.noise_term: must be >= 0")
    if any(c <= 0.0 for c in cells):
        raise ConfigError(f"{path}.half_cells_m: must be positive")
    return GridExampleSpec(tuple(alphas), noise_term, tuple(cells))


def _parse_regions(obj, path: str) -> tuple[RegionTableRow, ...]:
    obj = _require_mapping(obj, path, ("rows",))
    rows_raw = _pop(obj, "rows", path)
    if not isinstance(rows_raw, list) or not rows_raw:
        raise ConfigError(f"{path}.rows: expected a non-empty list")
    keys = ("name", "frequency_hz", "transmit_height_m", "receive_height_m", "fluctuation_distance_m")
    rows = []
    for i, row in enumerate(rows_raw):
        rpath = f"{path}.rows[{i}]"
        row = _require_mapping(row, rpath, keys)
        try:
            rows.append(
                RegionTableRow(
                    name=_as_str(_pop(row, "name", rpath), f"{rpath}.name"),
                    frequency_hz=_as_number(_pop(row, "frequency_hz", rpath), f"{rpath}.frequency_hz"),
                    transmit_height_m=_as_number(
                        _pop(row, "transmit_height_m", rpath), f"{rpath}.transmit_height_m"
                    ),
                    receive_height_m=_as_number(
                        _pop(row, "receive_height_m", rpath, 1.5), f"{rpath}.receive_height_m"
                    ),
                    fluctuation_distance_m=_as_number(
                        _pop(row, "fluctuation_distance_m", rpath, 0.2),
                        f"{rpath}.fluctuation_distance_m",
                    ),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{rpath}: {exc}") from exc
    return tuple(rows)


_TOP_KEYS = (
    "experiment",
    "seed",
    "trials",
    "threads",
    "output_csv",
    "scenario",
    "densities",
    "grid",
    "regions",
    "tail_min_density_per_km2",
    "tail_min_density_per_km3",
)


def parse_config(text: str, experiment: str | None = None) -> RunConfig:
    """Parse and validate a JSON experiment config.

    ``experiment`` (e.g. from a CLI subcommand) must agree with the file's
    own ``experiment`` key when both are given.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    raw = _require_mapping(raw, "config", _TOP_KEYS)

    file_experiment = raw.get("experiment")
    if file_experiment is not None:
        file_experiment = _as_str(file_experiment, "config.experiment")
        if file_experiment not in EXPERIMENTS:
            raise ConfigError(
                f"config.experiment: expected one of {EXPERIMENTS}, got {file_experiment!r}"
            )
    if experiment is not None and file_experiment is not None and experiment != file_experiment:
        raise ConfigError(
            f"config.experiment: file says {file_experiment!r} but {experiment!r} was requested"
        )
    exp = experiment or file_experiment
    if exp is None:
        raise ConfigError("config.experiment: required (or select a CLI subcommand)")

    seed = _as_int(_pop(raw, "seed", "config", 0), "config.seed")
    if seed < 0:
        raise ConfigError(f"config.seed: must be >= 0, got {seed}")
    trials = _as_int(_pop(raw, "trials", "config", DEFAULT_TRIALS), "config.trials")
    if trials < 1:
        raise ConfigError(f"config.trials: must be >= 1, got {trials}")
    threads = _pop(raw, "threads", "config", None)
    if threads is not None:
        threads = _as_int(threads, "config.threads")
        if threads < 1:
            raise ConfigError(f"config.threads: must be >= 1, got {threads}")
    output_csv = _as_str(
        _pop(raw, "output_csv", "config", exp.replace("-", "_") + ".csv"), "config.output_csv"
    )

    scenario = None
    densities = None
    grid_spec = None
    region_rows = REGION_TABLE_PRESETS
    tail_min = None

    if exp in _SCENARIO_EXPERIMENTS:
        if "scenario" not in raw:
            raise ConfigError(f"config.scenario: required for {exp}")
        scenario = _parse_scenario(raw["scenario"], "config.scenario")
    elif "scenario" in raw:
        raise ConfigError(f"config.scenario: not used by {exp}")

    if exp in _SWEEP_EXPERIMENTS:
        if "densities" not in raw:
            raise ConfigError(f"config.densities: required for {exp}")
        densities = _parse_densities(raw["densities"], "config.densities", scenario.density_unit)
    elif "densities" in raw:
        raise ConfigError(f"config.densities: not used by {exp}")

    if exp == "ccdf":
        if scenario.density <= 0.0:
            raise ConfigError(f"config.scenario.density_{scenario.density_unit}: required for ccdf")
        if len(scenario.thresholds) < 1:
            raise ConfigError("config.scenario: ccdf needs at least one threshold")

    if exp == "grid-example":
        grid_spec = _parse_grid_example(raw.get("grid", {}), "config.grid")
    elif "grid" in raw:
        raise ConfigError(f"config.grid: not used by {exp}")

    if exp == "regions-table":
        if "regions" in raw:
            region_rows = _parse_regions(raw["regions"], "config.regions")
    elif "regions" in raw:
        raise ConfigError(f"config.regions: not used by {exp}")

    for key in ("tail_min_density_per_km2", "tail_min_density_per_km3"):
        if key in raw:
            if exp != "scaling-exponent":
                raise ConfigError(f"config.{key}: not used by {exp}")
            if not key.endswith(scenario.density_unit):
                raise ConfigError(f"config.{key}: unit does not match the scenario geometry")
            tail_min = _as_number(raw[key], f"config.{key}")
            if tail_min < 0.0:
                raise ConfigError(f"config.{key}: must be >= 0")

    return RunConfig(
        experiment=exp,
        seed=seed,
        trials=trials,
        threads=threads,
        output_csv=output_csv,
        scenario=scenario,
        densities=densities,
        grid_example=grid_spec,
        region_rows=region_rows,
        tail_min_density=tail_min,
    )
