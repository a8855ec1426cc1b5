import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ntndoppler.channel import (DEFAULT_TAPS, SINGLE_TAP, ChannelConfig, TapSpec, add_noise, apply_channel,
                                apply_sampling_drift, drift_ratio, fixed_realization, normalized_powers, realize)
from ntndoppler.constants import SPEED_OF_LIGHT
from ntndoppler.errors import ConfigurationError, InputError
from ntndoppler.ofdm import OfdmConfig

CFG = OfdmConfig()


def _signal(rng, n, shape=()):
    return (rng.standard_normal(shape + (n,)) + 1j * rng.standard_normal(shape + (n,))) / np.sqrt(2)


class TestApplyChannel:
    def test_identity(self):
        x = _signal(np.random.default_rng(0), 1000)
        y = apply_channel(x, fixed_realization([[1.0]], [0]), CFG)
        assert y.shape == (1, 1000)
        np.testing.assert_array_equal(y[0], x)

    def test_oscillator_ramp(self):
        x = _signal(np.random.default_rng(1), 2000)
        y = apply_channel(x, fixed_realization([[1.0]], [0], 0.0, 1000.0), CFG)[0]
        slope = np.diff(np.unwrap(np.angle(y / x)))
        np.testing.assert_allclose(slope, 2 * np.pi * 1000 * CFG.sample_interval, atol=1e-9)

    def test_table_extremes_give_70_khz(self):
        v = 24.5e-6 * SPEED_OF_LIGHT
        df = 10.5e-6 * 2e9
        real = fixed_realization([[1.0]], [0], v, df)
        assert real.composite_offset_hz(2e9) == pytest.approx(70e3, rel=1e-12)
        y = apply_channel(np.ones(4096), real, CFG)[0]
        slope = np.angle(np.sum(np.conj(y[:-1]) * y[1:])) / (2 * np.pi * CFG.sample_interval)
        assert slope == pytest.approx(70e3, rel=1e-9)

    def test_position_offset_scales_doppler_only(self):
        real = fixed_realization([[1.0]], [0], 7000.0, 100.0)
        lo = real.composite_offset_hz(2e9, -432e6)
        hi = real.composite_offset_hz(2e9, 432e6)
        assert hi - lo == pytest.approx(7000.0 * 864e6 / SPEED_OF_LIGHT, rel=1e-12)

    def test_delay_and_gain(self):
        x = _signal(np.random.default_rng(2), 64)
        y = apply_channel(x, fixed_realization([[0.0, 0.5j]], [0, 3]), CFG)[0]
        np.testing.assert_allclose(y[3:], 0.5j * x[:-3], atol=1e-15)
        assert not np.any(y[:3])

    def test_burst_stack(self):
        x = _signal(np.random.default_rng(3), 50, (4,))
        real = fixed_realization([[1.0], [1j]], [0], 300.0, 50.0)
        y = apply_channel(x, real, CFG)
        assert y.shape == (2, 4, 50)
        np.testing.assert_allclose(y[1, 2], apply_channel(x[2], real, CFG)[1], atol=1e-15)

    def test_empty_input(self):
        with pytest.raises(InputError):
            apply_channel(np.zeros(0), fixed_realization([[1.0]], [0]), CFG)

    @settings(max_examples=40, deadline=None)
    @given(gain=st.floats(0.1, 10.0), df=st.floats(-21e3, 21e3), v=st.floats(-7400.0, 7400.0),
           seed=st.integers(0, 2 ** 32 - 1))
    def test_single_tap_magnitude_and_phase(self, gain, df, v, seed):
        x = _signal(np.random.default_rng(seed), 512) + 0.1  # keep away from zero
        real = fixed_realization([[gain]], [0], v, df)
        y = apply_channel(x, real, CFG)[0]
        np.testing.assert_allclose(np.abs(y), gain * np.abs(x), rtol=1e-12)
        phase = np.unwrap(np.angle(y * np.conj(x)))
        expected = 2 * np.pi * real.composite_offset_hz(CFG.carrier_freq_hz) * CFG.sample_interval
        np.testing.assert_allclose(np.diff(phase), expected, atol=1e-9)


class TestRealize:
    def test_default_taps_unit_power(self):
        assert normalized_powers(DEFAULT_TAPS).sum() == pytest.approx(1.0)
        assert DEFAULT_TAPS[0].los

    def test_single_tap_unit_magnitude(self):
        real = realize(ChannelConfig(taps=SINGLE_TAP, num_rx=3), np.random.default_rng(0))
        np.testing.assert_allclose(np.abs(real.gains), 1.0)
        assert real.num_rx == 3

    def test_average_power(self):
        rng = np.random.default_rng(4)
        p = [np.sum(np.abs(realize(ChannelConfig(taps=DEFAULT_TAPS), rng).gains) ** 2) for _ in range(4000)]
        assert np.mean(p) == pytest.approx(1.0, abs=0.02)

    def test_rejects_fractional_delay(self):
        with pytest.raises(ConfigurationError):
            TapSpec(1.5, 0.0)


class TestNoise:
    def test_noiseless_flag(self):
        x = _signal(np.random.default_rng(0), 100)
        np.testing.assert_array_equal(add_noise(x, math.inf, np.random.default_rng(1)), x)

    def test_unit_power_at_zero_db(self):
        x = np.exp(2j * np.pi * np.random.default_rng(5).random(100_000))
        noise = add_noise(x, 0.0, np.random.default_rng(6)) - x
        assert np.mean(np.abs(noise) ** 2) == pytest.approx(1.0, rel=0.05)

    @pytest.mark.parametrize("snr_db", [-3.0, 5.0, 13.0])
    def test_measured_snr(self, snr_db):
        x = 3.0 * _signal(np.random.default_rng(7), 100_000)
        noise = add_noise(x, snr_db, np.random.default_rng(8)) - x
        measured = 10 * np.log10(np.mean(np.abs(x) ** 2) / np.mean(np.abs(noise) ** 2))
        assert abs(measured - snr_db) < 0.2

    def test_per_antenna_snr_and_independence(self):
        rng = np.random.default_rng(9)
        x = np.stack([_signal(rng, 100_000), 10 * _signal(rng, 100_000)])
        noise = add_noise(x, 3.0, np.random.default_rng(10)) - x
        for a in range(2):
            measured = 10 * np.log10(np.mean(np.abs(x[a]) ** 2) / np.mean(np.abs(noise[a]) ** 2))
            assert abs(measured - 3.0) < 0.2
        rho = abs(np.vdot(noise[0], noise[1])) / (np.linalg.norm(noise[0]) * np.linalg.norm(noise[1]))
        assert rho < 0.01

    def test_deterministic(self):
        x = _signal(np.random.default_rng(0), 256)
        a = add_noise(x, 1.0, np.random.default_rng(42))
        b = add_noise(x, 1.0, np.random.default_rng(42))
        np.testing.assert_array_equal(a, b)


class TestSamplingDrift:
    def test_alpha_value(self):
        assert CFG.sample_rate_hz / CFG.carrier_freq_hz == pytest.approx(3.84e-3, rel=1e-12)

    def test_zero_offset_is_identity(self):
        x = _signal(np.random.default_rng(11), 2048, (2,))
        y = apply_sampling_drift(x, 3.84e-3, 0.0, CFG.sample_rate_hz)
        np.testing.assert_allclose(y, x, atol=1e-8)

    def test_ratio(self):
        # f_c = f_s / alpha = 2 GHz; receiver clocks at alpha (f_c - df)
        assert drift_ratio(7.68e6, 3.84e-3, 21e3) == pytest.approx(2e9 / (2e9 - 21e3), rel=1e-14)

    def test_tone_frequency_scales_with_interval_ratio(self):
        # exaggerated drift so the shift is resolvable: delta = 5e-3
        fs, alpha = CFG.sample_rate_hz, 0.05
        carrier = fs / alpha
        df = carrier * (1 - 1 / 1.005)
        ratio = drift_ratio(fs, alpha, df)
        assert ratio == pytest.approx(1.005, rel=1e-12)
        n = 8192
        f0 = 400 * fs / n
        y = apply_sampling_drift(np.exp(2j * np.pi * f0 * np.arange(n) / fs), alpha, df, fs)
        body = y[64:n - 64]
        spec = np.abs(np.fft.fft(body, 16 * body.size))
        peak = np.argmax(spec) * fs / spec.size
        assert peak == pytest.approx(f0 * ratio, abs=fs / spec.size)
        fine = np.angle(np.sum(np.conj(body[:-1]) * body[1:])) * fs / (2 * np.pi)
        assert fine == pytest.approx(f0 * ratio, rel=1e-6)

    def test_ratio_bound(self):
        with pytest.raises(ConfigurationError):
            apply_sampling_drift(np.ones(16), 0.5, 0.05 * 7.68e6 / 0.5, 7.68e6)
