"""Deployment regions and base-station location sampling.

The tagged user sits at the origin of every region. Base stations are drawn
inside a finite window centred on the user: a disc in the plane, a ball in
free 3D space, or an upper half-ball when transmitters only occupy the
vertical half-space above the ground plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Dimension(Enum):
    """Deployment space for the base-station point process."""

    PLANE_2D = "2d"
    SPACE_3D = "3d"
    HALF_SPACE_3D_PLUS = "3d+"

    @property
    def ndim(self) -> int:
        return 2 if self is Dimension.PLANE_2D else 3

    @property
    def solid_angle(self) -> float:
        """Angular measure of the region around the origin.

        2*pi for the plane, 4*pi for full 3D, 2*pi for the upper half-space.
        Shell measure at radius r is ``solid_angle * r**(ndim-1)``.
        """
        if self is Dimension.SPACE_3D:
            return 4.0 * math.pi
        return 2.0 * math.pi


@dataclass(frozen=True)
class DeploymentGeometry:
    """Sampling window for one deployment.

    ``window_radius_m = None`` leaves the radius unresolved; the Monte Carlo
    engine then picks it per density so that truncation error stays below
    simulation noise (see ``montecarlo.resolve_window``).
    """

    dimension: Dimension
    window_radius_m: float | None = None

    def __post_init__(self) -> None:
        if self.window_radius_m is not None:
            r = self.window_radius_m
            if not (math.isfinite(r) and r > 0.0):
                raise ValueError(f"window_radius_m must be positive and finite, got {r}")

    def with_radius(self, radius_m: float) -> "DeploymentGeometry":
        return DeploymentGeometry(self.dimension, radius_m)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Base-station locations, in sampling order.

    The order is significant: ties in downstream nearest-point association
    break toward the lowest index, so it must stay stable.
    """

    points: np.ndarray  # shape (n, ndim), metres
    dimension: Dimension

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dimension.ndim:
            raise ValueError(
                f"points must have shape (n, {self.dimension.ndim}), got {pts.shape}"
            )
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def distances_from_origin(self) -> np.ndarray:
        return np.sqrt(np.sum(self.points * self.points, axis=1))


def region_measure(geometry: DeploymentGeometry) -> float:
    """Area (m^2) or volume (m^3) of the sampling window."""
    radius = geometry.window_radius_m
    if radius is None:
        raise ValueError("geometry has no resolved window radius")
    n = geometry.dimension.ndim
    return geometry.dimension.solid_angle * radius**n / n


def _radial_distances(count: int, radius: float, ndim: int, rng: np.random.Generator) -> np.ndarray:
    """Distances from the origin of ``count`` uniform points in a disc/ball.

    The radial CDF is (r/R)^ndim in either the full or half ball. Uniform
    deviates are floored at the smallest normal double so a zero draw cannot
    produce a BS exactly on top of the user.
    """
    u = np.maximum(rng.random(count), np.finfo(float).tiny)
    return radius * u ** (1.0 / ndim)


def sample_ppp_distances(
    density: float, geometry: DeploymentGeometry, rng: np.random.Generator
) -> np.ndarray:
    """Distances-from-origin of one Poisson point process realization.

    Distributionally equivalent to taking norms of ``sample_ppp`` output but
    skips the angular coordinates, which carry no information for a user at
    the window centre. ``density`` is per m^2 or m^3 to match the geometry.
    """
    if density < 0.0:
        raise ValueError(f"density must be >= 0, got {density}")
    count = int(rng.poisson(density * region_measure(geometry)))
    return _radial_distances(count, geometry.window_radius_m, geometry.dimension.ndim, rng)


def sample_ppp(
    density: float, geometry: DeploymentGeometry, rng: np.random.Generator
) -> PointSet:
    """Sample a homogeneous PPP over the window.

    The count is Poisson with mean density * measure; locations are i.i.d.
    uniform. Density 0 yields an empty set.
    """
    if density < 0.0:
        raise ValueError(f"density must be >= 0, got {density}")
    count = int(rng.poisson(density * region_measure(geometry)))
    dim = geometry.dimension
    r = _radial_distances(count, geometry.window_radius_m, dim.ndim, rng)
    phi = rng.uniform(0.0, 2.0 * math.pi, count)
    if dim is Dimension.PLANE_2D:
        pts = np.column_stack((r * np.cos(phi), r * np.sin(phi)))
    else:
        # Uniform direction: cos(polar angle) uniform on [-1, 1], or [0, 1]
        # when transmitters are restricted to the upper half-space.
        lo = 0.0 if dim is Dimension.HALF_SPACE_3D_PLUS else -1.0
        z = rng.uniform(lo, 1.0, count)
        s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        pts = np.column_stack((r * s * np.cos(phi), r * s * np.sin(phi), r * z))
    return PointSet(pts, dim)


def make_square_grid(half_cell_m: float) -> PointSet:
    """3x3 square lattice of base stations with spacing twice the half cell.

    The middle base station sits at the origin; one BS per cell gives a
    density of 1/(2*half_cell)^2.
    """
    if not (math.isfinite(half_cell_m) and half_cell_m > 0.0):
        raise ValueError(f"half_cell_m must be positive, got {half_cell_m}")
    step = 2.0 * half_cell_m
    pts = [(step * i, step * j) for j in (-1, 0, 1) for i in (-1, 0, 1)]
    return PointSet(np.asarray(pts, dtype=float), Dimension.PLANE_2D)


def grid_density_per_km2(half_cell_m: float) -> float:
    """BS density of the square grid, in BSs per km^2."""
    cell_area_km2 = (2.0 * half_cell_m / 1000.0) ** 2
    return 1.0 / cell_area_km2
