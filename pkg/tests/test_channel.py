import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

import udnsim as u


class TestFadingModel:
    def test_kinds(self):
        assert u.FadingModel.none().kind == "none"
        assert u.FadingModel.rayleigh().kind == "rayleigh"
        assert u.FadingModel.nakagami(2.5).nakagami_m == 2.5

    @pytest.mark.parametrize("m", [0.49, 0.0, -1.0, math.nan])
    def test_invalid_shape(self, m):
        with pytest.raises(ValueError):
            u.FadingModel.nakagami(m)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            u.FadingModel("rice")

    def test_shape_only_for_nakagami(self):
        with pytest.raises(ValueError):
            u.FadingModel("rayleigh", 2.0)

    def test_second_moment(self):
        assert u.FadingModel.none().power_second_moment == 1.0
        assert u.FadingModel.rayleigh().power_second_moment == 2.0
        assert u.FadingModel.nakagami(4.0).power_second_moment == pytest.approx(1.25)


class TestSampleFadingPower:
    def test_none_is_exactly_one(self, rng):
        assert u.sample_fading_power(u.FadingModel.none(), rng) == 1.0
        assert np.all(u.sample_fading_power(u.FadingModel.none(), rng, size=7) == 1.0)

    def test_rayleigh_unit_mean(self, rng):
        h = u.sample_fading_power(u.FadingModel.rayleigh(), rng, size=1_000_000)
        assert abs(h.mean() - 1.0) < 0.01

    @pytest.mark.parametrize("model", [u.FadingModel.rayleigh(), u.FadingModel.nakagami(0.5), u.FadingModel.nakagami(3.0)])
    def test_unit_mean_within_three_se(self, model, rng):
        h = u.sample_fading_power(model, rng, size=1_000_000)
        se = h.std() / math.sqrt(h.size)
        assert abs(h.mean() - 1.0) < 3.0 * se

    def test_nakagami_one_is_rayleigh(self, rng):
        h = u.sample_fading_power(u.FadingModel.nakagami(1.0), rng, size=100_000)
        _, pvalue = stats.kstest(h, "expon")
        assert pvalue > 0.01

    def test_nakagami_variance(self, rng):
        m = 2.0
        h = u.sample_fading_power(u.FadingModel.nakagami(m), rng, size=1_000_000)
        var = h.var()
        centered = (h - h.mean()) ** 2
        se_var = centered.std() / math.sqrt(h.size)
        assert abs(var - 1.0 / m) < 3.0 * se_var


class TestNoiseSpec:
    def test_exactly_one_variant(self):
        with pytest.raises(ValueError):
            u.NoiseSpec()
        with pytest.raises(ValueError):
            u.NoiseSpec(sigma2_watts=1.0, snr_at_corner_db=20.0)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            u.NoiseSpec.absolute(-1e-9)

    def test_off_is_pure_sir(self):
        assert u.NoiseSpec.off().sigma2_watts == 0.0


class TestResolveNoise:
    DUAL = u.PathLossModel.dual_slope(2.0, 4.0, 100.0)

    def test_snr_definition(self):
        # mean received power at the corner is 1e-8 W; 20 dB below is 1e-10 W
        model = u.PathLossModel.dual_slope(2.0, 4.0, 100.0, reference_gain=1e-4)
        sigma2 = u.resolve_noise(u.NoiseSpec.snr_at_corner(20.0), model, 1.0)
        assert sigma2 == pytest.approx(1e-10)

    def test_absolute_passthrough(self):
        assert u.resolve_noise(u.NoiseSpec.absolute(0.0), self.DUAL, 1.0) == 0.0
        assert u.resolve_noise(u.NoiseSpec.absolute(3e-7), self.DUAL, 5.0) == 3e-7

    def test_unit_gain_case(self):
        # gain(100 m) = 1e-4 under the close-in slope; SNR 20 dB -> 1e-6 W
        sigma2 = u.resolve_noise(u.NoiseSpec.snr_at_corner(20.0), self.DUAL, 1.0)
        assert sigma2 == pytest.approx(1e-6)

    def test_single_slope_needs_corner(self):
        with pytest.raises(ValueError, match="corner"):
            u.resolve_noise(u.NoiseSpec.snr_at_corner(20.0), u.PathLossModel.single_slope(4.0), 1.0)

    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_homogeneous_in_transmit_power(self, power):
        base = u.resolve_noise(u.NoiseSpec.snr_at_corner(17.0), self.DUAL, 1.0)
        scaled = u.resolve_noise(u.NoiseSpec.snr_at_corner(17.0), self.DUAL, power)
        assert scaled == pytest.approx(power * base, rel=1e-12)
