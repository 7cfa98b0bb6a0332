"""Distance-dependent attenuation models.

Two families live here: piecewise power-law ("multi-slope") path gain with
continuity-enforcing constants at each breakpoint, and the two-ray ground
bounce geometry that splits a link into small-scale interference, large-scale
interference, and ground Fresnel regions.

All gains are linear-scale ratios of received to transmitted power; convert
to dB only at the I/O boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

SPEED_OF_LIGHT_M_S = 3.0e8


@dataclass(frozen=True)
class PathLossModel:
    """Piecewise power-law attenuation.

    ``exponents[i]`` applies between ``breakpoints_m[i-1]`` and
    ``breakpoints_m[i]`` (the first segment starts at 0, the last extends to
    infinity). ``reference_gain`` is the gain at 1 m under the first
    exponent. Per-segment constants beyond the first are derived, never
    supplied: each is forced so adjacent segments agree at the breakpoint.
    """

    exponents: tuple[float, ...]
    breakpoints_m: tuple[float, ...] = ()
    reference_gain: float = 1.0

    def __post_init__(self) -> None:
        exps = tuple(float(a) for a in self.exponents)
        bps = tuple(float(b) for b in self.breakpoints_m)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "breakpoints_m", bps)
        if not exps:
            raise ValueError("at least one path loss exponent is required")
        if len(bps) != len(exps) - 1:
            raise ValueError(
                f"{len(exps)} exponents require {len(exps) - 1} breakpoints, got {len(bps)}"
            )
        if any(not math.isfinite(a) or a <= 0.0 for a in exps):
            raise ValueError(f"exponents must be positive and finite: {exps}")
        for lo, hi in zip(exps, exps[1:]):
            if hi < lo:
                raise ValueError(f"exponents must be non-decreasing: {exps}")
        if any(not math.isfinite(b) or b <= 0.0 for b in bps):
            raise ValueError(f"breakpoints must be positive and finite: {bps}")
        for lo, hi in zip(bps, bps[1:]):
            if hi <= lo:
                raise ValueError(f"breakpoints must be strictly increasing: {bps}")
        if not (math.isfinite(self.reference_gain) and self.reference_gain > 0.0):
            raise ValueError(f"reference_gain must be positive, got {self.reference_gain}")

    @classmethod
    def single_slope(cls, exponent: float, reference_gain: float = 1.0) -> "PathLossModel":
        return cls((exponent,), (), reference_gain)

    @classmethod
    def dual_slope(
        cls,
        close_exponent: float,
        far_exponent: float,
        corner_distance_m: float,
        reference_gain: float = 1.0,
    ) -> "PathLossModel":
        return cls((close_exponent, far_exponent), (corner_distance_m,), reference_gain)

    @property
    def corner_distance_m(self) -> float | None:
        """First breakpoint, bounding the close-in region; None if single slope."""
        return self.breakpoints_m[0] if self.breakpoints_m else None

    @cached_property
    def segment_gains(self) -> tuple[float, ...]:
        """Per-segment constants (reference gain first, then continuity gains)."""
        return (self.reference_gain, *continuity_gains(self))

    @cached_property
    def _gain_arr(self) -> np.ndarray:
        return np.asarray(self.segment_gains, dtype=float)

    @cached_property
    def _exp_arr(self) -> np.ndarray:
        return np.asarray(self.exponents, dtype=float)

    @cached_property
    def _bp_arr(self) -> np.ndarray:
        return np.asarray(self.breakpoints_m, dtype=float)


def continuity_gains(model: PathLossModel) -> list[float]:
    """Constants that keep the gain continuous at each breakpoint.

    Each equals the previous constant times breakpoint^(exponent step), so
    both neighbouring segments evaluate identically at the breakpoint.
    Single-slope models return an empty list.
    """
    gains: list[float] = []
    prev = model.reference_gain
    for bp, a_lo, a_hi in zip(model.breakpoints_m, model.exponents, model.exponents[1:]):
        prev = prev * bp ** (a_hi - a_lo)
        gains.append(prev)
    return gains


def path_gain(model: PathLossModel, distance_m: float | np.ndarray) -> float | np.ndarray:
    """Evaluate the piecewise power-law gain at one or many distances.

    Returns received power as a fraction of transmitted power. At a
    breakpoint both segments agree, so segment choice there is immaterial.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0.0) or np.any(~np.isfinite(d)):
        raise ValueError("distance must be positive and finite")
    if len(model.exponents) == 1:
        g = model.reference_gain * d ** -model.exponents[0]
    else:
        seg = np.searchsorted(model._bp_arr, d, side="left")
        g = model._gain_arr[seg] * d ** -model._exp_arr[seg]
    if np.ndim(distance_m) == 0:
        return float(g)
    return g


# --- Two-ray ground reflection regimes ------------------------------------


@dataclass(frozen=True)
class TwoRayConfig:
    """Link geometry for the two-ray ground bounce model."""

    wavelength_m: float
    transmit_height_m: float
    receive_height_m: float = 1.5
    fluctuation_distance_m: float = 0.2

    def __post_init__(self) -> None:
        for name in ("wavelength_m", "transmit_height_m", "receive_height_m", "fluctuation_distance_m"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {v}")

    @classmethod
    def from_frequency(
        cls,
        frequency_hz: float,
        transmit_height_m: float,
        receive_height_m: float = 1.5,
        fluctuation_distance_m: float = 0.2,
    ) -> "TwoRayConfig":
        if not (math.isfinite(frequency_hz) and frequency_hz > 0.0):
            raise ValueError(f"frequency_hz must be positive, got {frequency_hz}")
        return cls(
            SPEED_OF_LIGHT_M_S / frequency_hz,
            transmit_height_m,
            receive_height_m,
            fluctuation_distance_m,
        )


class PropagationRegion(Enum):
    SMALL_SCALE_INTERFERENCE = "small-scale-interference"
    LARGE_SCALE_INTERFERENCE = "large-scale-interference"
    GROUND_FRESNEL = "ground-fresnel"


@dataclass(frozen=True)
class RegionClassification:
    region: PropagationRegion
    degenerate_two_way: bool
    small_scale_boundary_m: float
    fresnel_breakpoint_m: float


def small_scale_boundary(config: TwoRayConfig) -> float:
    """Separation below which direct/reflected interference fluctuates over
    sub-metre receiver motion: 4*pi * transmit height * fluctuation distance
    / wavelength.
    """
    return (
        4.0
        * math.pi
        * config.transmit_height_m
        * config.fluctuation_distance_m
        / config.wavelength_m
    )


def fresnel_breakpoint(config: TwoRayConfig) -> float:
    """Classical two-ray breakpoint 4 * h_t * h_r / wavelength beyond which
    the ground bounce interferes destructively (far-field slope ~4).
    """
    return (
        4.0
        * config.transmit_height_m
        * config.receive_height_m
        / config.wavelength_m
    )


def classify_propagation_region(r_m: float, config: TwoRayConfig) -> RegionClassification:
    """Place a transmit-receive separation into one of the two-ray regimes.

    When the small-scale boundary reaches past the Fresnel breakpoint the
    middle region is empty and classification degrades to a two-way split at
    the larger boundary, flagged via ``degenerate_two_way``.
    """
    if not (math.isfinite(r_m) and r_m > 0.0):
        raise ValueError(f"separation must be positive, got {r_m}")
    ssb = small_scale_boundary(config)
    fbp = fresnel_breakpoint(config)
    degenerate = ssb >= fbp
    if degenerate:
        region = (
            PropagationRegion.SMALL_SCALE_INTERFERENCE
            if r_m < ssb
            else PropagationRegion.GROUND_FRESNEL
        )
    elif r_m < ssb:
        region = PropagationRegion.SMALL_SCALE_INTERFERENCE
    elif r_m > fbp:
        region = PropagationRegion.GROUND_FRESNEL
    else:
        region = PropagationRegion.LARGE_SCALE_INTERFERENCE
    return RegionClassification(region, degenerate, ssb, fbp)


@dataclass(frozen=True)
class RegionTableRow:
    """One transmitter configuration for the regime-boundary table."""

    name: str
    frequency_hz: float
    transmit_height_m: float
    receive_height_m: float = 1.5
    fluctuation_distance_m: float = 0.2

    def config(self) -> TwoRayConfig:
        return TwoRayConfig.from_frequency(
            self.frequency_hz,
            self.transmit_height_m,
            self.receive_height_m,
            self.fluctuation_distance_m,
        )


# Representative transmitter classes spanning macro deployments to indoor
# mmWave, all evaluated at a 20 cm fluctuation threshold.
REGION_TABLE_PRESETS: tuple[RegionTableRow, ...] = (
    RegionTableRow("cellular-macrocell", 860e6, 60.0),
    RegionTableRow("802.11b-access-point", 2.4e9, 3.0),
    RegionTableRow("802.11a-access-point", 5.8e9, 3.0),
    RegionTableRow("lte-microcell", 700e6, 5.0),
    RegionTableRow("mmwave-femtocell", 60e9, 2.0),
)
