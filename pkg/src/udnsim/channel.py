"""Small-scale fading and thermal-noise conventions.

Fading power gains are unit-mean by construction so they never shift the
average received power, only its distribution. Noise is either an absolute
power or pinned through the SNR measured at the path-loss corner distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .propagation import PathLossModel, path_gain

FADING_KINDS = ("none", "rayleigh", "nakagami")


@dataclass(frozen=True)
class FadingModel:
    """Per-link power fading: deterministic, Rayleigh, or Nakagami-m."""

    kind: str
    nakagami_m: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in FADING_KINDS:
            raise ValueError(f"unknown fading kind {self.kind!r}; expected one of {FADING_KINDS}")
        if self.kind == "nakagami":
            m = self.nakagami_m
            if m is None or not (math.isfinite(m) and m >= 0.5):
                raise ValueError(f"nakagami shape must be >= 0.5, got {m}")
        elif self.nakagami_m is not None:
            raise ValueError(f"nakagami_m only applies to nakagami fading, got kind={self.kind!r}")

    @classmethod
    def none(cls) -> "FadingModel":
        return cls("none")

    @classmethod
    def rayleigh(cls) -> "FadingModel":
        return cls("rayleigh")

    @classmethod
    def nakagami(cls, m: float) -> "FadingModel":
        return cls("nakagami", m)

    @property
    def power_second_moment(self) -> float:
        """E[h^2] of the unit-mean power gain (feeds interference-variance math)."""
        if self.kind == "none":
            return 1.0
        if self.kind == "rayleigh":
            return 2.0
        return 1.0 + 1.0 / self.nakagami_m


def sample_fading_power(
    model: FadingModel, rng: np.random.Generator, size: int | None = None
) -> float | np.ndarray:
    """Draw i.i.d. unit-mean power gains; scalar when ``size`` is None.

    Rayleigh amplitude fading gives exponential power; Nakagami-m gives
    gamma(shape=m, scale=1/m). Nakagami-1 coincides with Rayleigh.
    """
    if model.kind == "none":
        return 1.0 if size is None else np.ones(size)
    if model.kind == "rayleigh":
        out = rng.exponential(1.0, size)
    else:
        out = rng.gamma(model.nakagami_m, 1.0 / model.nakagami_m, size)
    return float(out) if size is None else out


@dataclass(frozen=True)
class NoiseSpec:
    """Thermal noise, as absolute power or as SNR at the corner distance.

    Exactly one of the two fields is set. ``sigma2_watts = 0`` selects the
    interference-limited (pure SIR) regime.
    """

    sigma2_watts: float | None = None
    snr_at_corner_db: float | None = None

    def __post_init__(self) -> None:
        has_abs = self.sigma2_watts is not None
        has_snr = self.snr_at_corner_db is not None
        if has_abs == has_snr:
            raise ValueError("exactly one of sigma2_watts / snr_at_corner_db must be set")
        if has_abs and not (math.isfinite(self.sigma2_watts) and self.sigma2_watts >= 0.0):
            raise ValueError(f"sigma2_watts must be >= 0, got {self.sigma2_watts}")
        if has_snr and not math.isfinite(self.snr_at_corner_db):
            raise ValueError(f"snr_at_corner_db must be finite, got {self.snr_at_corner_db}")

    @classmethod
    def absolute(cls, sigma2_watts: float) -> "NoiseSpec":
        return cls(sigma2_watts=sigma2_watts)

    @classmethod
    def off(cls) -> "NoiseSpec":
        return cls(sigma2_watts=0.0)

    @classmethod
    def snr_at_corner(cls, snr_db: float) -> "NoiseSpec":
        return cls(snr_at_corner_db=snr_db)


def resolve_noise(spec: NoiseSpec, model: PathLossModel, transmit_power_w: float) -> float:
    """Noise power in watts for this link budget.

    The SNR variant anchors noise to the mean received power at the corner
    distance: sigma^2 = P_t * gain(corner) / 10^(SNR/10). It therefore needs
    a model with at least one breakpoint.
    """
    if not (math.isfinite(transmit_power_w) and transmit_power_w > 0.0):
        raise ValueError(f"transmit power must be positive, got {transmit_power_w}")
    if spec.sigma2_watts is not None:
        return spec.sigma2_watts
    corner = model.corner_distance_m
    if corner is None:
        raise ValueError("snr_at_corner noise needs a path-loss model with a corner distance")
    received_w = transmit_power_w * path_gain(model, corner)
    return received_w / 10.0 ** (spec.snr_at_corner_db / 10.0)
