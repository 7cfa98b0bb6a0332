"""Monte Carlo simulator for coverage and throughput under densification.

Samples downlink cellular deployments as Poisson point processes, evaluates
the tagged user's SINR under single- or multi-slope path loss, and sweeps
base-station density to expose coverage peaks, critical densities, and
throughput scaling exponents.
"""

from .analysis import (
    CriticalDensityResult,
    InsufficientDataError,
    ScalingFit,
    SweepResult,
    SweepRow,
    find_critical_density,
    fit_scaling_exponent,
    normalized_critical_density,
    run_density_sweep,
    scenario_fingerprint,
)
from .channel import FadingModel, NoiseSpec, resolve_noise, sample_fading_power
from .geometry import (
    DeploymentGeometry,
    Dimension,
    PointSet,
    make_square_grid,
    region_measure,
    sample_ppp,
    sample_ppp_distances,
)
from .montecarlo import (
    CoverageEstimate,
    NetworkScenario,
    derive_seed,
    estimate_coverage,
    estimate_sir_ccdf,
    potential_throughput,
    resolve_window,
)
from .propagation import (
    PathLossModel,
    PropagationRegion,
    RegionClassification,
    TwoRayConfig,
    classify_propagation_region,
    continuity_gains,
    fresnel_breakpoint,
    path_gain,
    small_scale_boundary,
)
from .sinr import SinrSample, associate, compute_sinr, grid_corner_sir

__version__ = "0.1.0"

__all__ = [
    "CoverageEstimate",
    "CriticalDensityResult",
    "DeploymentGeometry",
    "Dimension",
    "FadingModel",
    "InsufficientDataError",
    "NetworkScenario",
    "NoiseSpec",
    "PathLossModel",
    "PointSet",
    "PropagationRegion",
    "RegionClassification",
    "ScalingFit",
    "SinrSample",
    "SweepResult",
    "SweepRow",
    "TwoRayConfig",
    "associate",
    "classify_propagation_region",
    "compute_sinr",
    "continuity_gains",
    "derive_seed",
    "estimate_coverage",
    "estimate_sir_ccdf",
    "find_critical_density",
    "fit_scaling_exponent",
    "fresnel_breakpoint",
    "grid_corner_sir",
    "make_square_grid",
    "normalized_critical_density",
    "path_gain",
    "potential_throughput",
    "region_measure",
    "resolve_noise",
    "resolve_window",
    "run_density_sweep",
    "sample_fading_power",
    "sample_ppp",
    "sample_ppp_distances",
    "scenario_fingerprint",
    "small_scale_boundary",
]
