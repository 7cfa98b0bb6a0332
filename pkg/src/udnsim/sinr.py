"""Serving-cell association and per-realization SINR.

The tagged user at the origin connects to the base station with the
strongest mean received power; with a monotone path-gain model that is the
nearest one. Every other base station transmits continuously (full load)
and contributes interference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import FadingModel, sample_fading_power
from .geometry import PointSet, make_square_grid
from .propagation import PathLossModel, path_gain


@dataclass(frozen=True)
class SinrSample:
    """One realization's link budget at the tagged user."""

    serving_index: int
    sinr: float  # may be math.inf when nothing opposes the signal
    signal_w: float
    interference_w: float
    noise_w: float


def associate(points: PointSet, model: PathLossModel) -> int:
    """Index of the serving base station: nearest to the origin.

    Under a non-increasing gain model this is also the argmax of mean
    received power. Exact distance ties resolve to the lowest sampling
    index.
    """
    if len(points) == 0:
        raise ValueError("cannot associate against an empty point set")
    dists = points.distances_from_origin()
    return int(np.argmin(dists))


def compute_sinr(
    points: PointSet,
    serving_index: int,
    model: PathLossModel,
    fading: FadingModel,
    sigma2_w: float,
    transmit_power_w: float = 1.0,
    rng: np.random.Generator | None = None,
) -> SinrSample:
    """SINR of the tagged user for one network realization.

    Signal is the faded received power from the serving BS; interference is
    the sum over every other BS, all transmitting at full power. A lone BS
    with zero noise yields infinite SINR (covered at any finite threshold).
    """
    n = len(points)
    if not 0 <= serving_index < n:
        raise ValueError(f"serving_index {serving_index} out of range for {n} points")
    if sigma2_w < 0.0:
        raise ValueError(f"sigma2_w must be >= 0, got {sigma2_w}")
    if fading.kind != "none" and rng is None:
        raise ValueError("random fading requires an rng")

    dists = points.distances_from_origin()
    gains = np.asarray(path_gain(model, dists), dtype=float)
    h = sample_fading_power(fading, rng, size=n) if fading.kind != "none" else np.ones(n)
    powers = transmit_power_w * h * gains

    signal = float(powers[serving_index])
    mask = np.ones(n, dtype=bool)
    mask[serving_index] = False
    interference = float(powers[mask].sum())

    denom = interference + sigma2_w
    if math.isinf(signal):
        sinr = math.inf
    elif denom == 0.0:
        sinr = math.inf
    else:
        sinr = signal / denom
    return SinrSample(serving_index, sinr, signal, interference, sigma2_w)


# --- Exact 3x3 grid corner reference ---------------------------------------


def grid_corner_sir(alpha: float, noise_term: float = 0.0) -> float:
    """Closed-form SINR of a corner user served by the middle BS of a 3x3 grid.

    With cell half-edge R, the serving BS sits at sqrt(2)R, three interferers
    at sqrt(2)R, four at sqrt(10)R and the far diagonal one at 3*sqrt(2)R
    (squared distance 18 R^2). Normalizing by R^-alpha removes R entirely,
    leaving the dimensionless noise term sigma^2 R^alpha / (P_t K_0):

        2^(-a/2) / (3*2^(-a/2) + 4*10^(-a/2) + 18^(-a/2) + noise_term)
    """
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not noise_term >= 0.0:
        raise ValueError(f"noise_term must be >= 0, got {noise_term}")
    half = alpha / 2.0
    num = 2.0**-half
    den = 3.0 * 2.0**-half + 4.0 * 10.0**-half + 18.0**-half + noise_term
    return num / den


def grid_noise_term(
    sigma2_w: float,
    half_cell_m: float,
    alpha: float,
    transmit_power_w: float = 1.0,
    reference_gain: float = 1.0,
) -> float:
    """Dimensionless noise term sigma^2 R^alpha / (P_t K_0) for the grid form."""
    return sigma2_w * half_cell_m**alpha / (transmit_power_w * reference_gain)


def grid_corner_points(half_cell_m: float) -> PointSet:
    """The 3x3 grid translated so the tagged user sits at a corner of the
    middle cell (the middle BS ends up at (-R, -R))."""
    grid = make_square_grid(half_cell_m)
    shifted = grid.points - np.array([half_cell_m, half_cell_m])
    return PointSet(shifted, grid.dimension)


def grid_corner_sir_simulated(
    half_cell_m: float,
    alpha: float,
    noise_term: float = 0.0,
    transmit_power_w: float = 1.0,
    reference_gain: float = 1.0,
) -> float:
    """Evaluate the corner-user SINR on the explicit 9-point grid.

    Cross-checks the closed form through the generic association and SINR
    path (no fading; the noise term is converted back to absolute watts).
    """
    model = PathLossModel.single_slope(alpha, reference_gain)
    pts = grid_corner_points(half_cell_m)
    sigma2 = noise_term * transmit_power_w * reference_gain / half_cell_m**alpha
    serving = associate(pts, model)
    return compute_sinr(pts, serving, model, FadingModel.none(), sigma2, transmit_power_w).sinr
