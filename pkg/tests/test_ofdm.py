import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ntndoppler.errors import ConfigurationError, InputError
from ntndoppler.ofdm import OfdmConfig, demodulate, ici_profile, modulate


def _random_symbols(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _ramp_pipeline(cfg, X, offset_hz):
    """modulate -> multiply by exp(j 2 pi f n T_s) over the body -> demodulate."""
    x = modulate(X, cfg)
    n = np.arange(x.shape[-1]) - cfg.cp_len
    return demodulate(x * np.exp(2j * np.pi * offset_hz * n * cfg.sample_interval), cfg)


class TestConfig:
    def test_derived_interval(self):
        cfg = OfdmConfig()
        assert cfg.sample_rate_hz == 7.68e6
        assert cfg.sample_interval == pytest.approx(1 / 7.68e6, rel=1e-15)
        assert cfg.symbol_len == 274

    @pytest.mark.parametrize("n", [0, 1, 100, 255])
    def test_rejects_non_power_of_two(self, n):
        with pytest.raises(ConfigurationError):
            OfdmConfig(dft_size=n)

    @pytest.mark.parametrize("cp", [-1, 64])
    def test_rejects_bad_cp(self, cp):
        with pytest.raises(ConfigurationError):
            OfdmConfig(dft_size=64, cp_len=cp)


class TestModulate:
    def test_zero_in_zero_out(self):
        cfg = OfdmConfig(dft_size=8, cp_len=2)
        assert not np.any(modulate(np.zeros(8), cfg))

    def test_dc_is_constant(self):
        cfg = OfdmConfig(dft_size=8, cp_len=0)
        X = np.zeros(8)
        X[0] = 1.0
        np.testing.assert_allclose(modulate(X, cfg), np.full(8, 1 / 8), atol=1e-15)

    def test_single_subcarrier_matches_direct_sum(self):
        cfg = OfdmConfig(dft_size=8, cp_len=0)
        X = np.zeros(8, complex)
        X[2] = 1.0
        n = np.arange(8)
        direct = np.array([sum(X[k] * np.exp(2j * np.pi * k * m / 8) for k in range(8)) / 8 for m in n])
        np.testing.assert_allclose(modulate(X, cfg), direct, atol=1e-15)
        np.testing.assert_allclose(direct, np.exp(2j * np.pi * n * 2 / 8) / 8, atol=1e-15)

    def test_size_mismatch(self):
        with pytest.raises(ConfigurationError):
            modulate(np.zeros(7), OfdmConfig(dft_size=8, cp_len=0))

    def test_leading_axes_are_independent(self):
        cfg = OfdmConfig(dft_size=16, cp_len=4)
        X = _random_symbols(np.random.default_rng(1), (3, 2, 16))
        out = modulate(X, cfg)
        assert out.shape == (3, 2, 20)
        np.testing.assert_allclose(out[1, 0], modulate(X[1, 0], cfg))


class TestDemodulate:
    def test_zero(self):
        cfg = OfdmConfig(dft_size=16, cp_len=0)
        assert not np.any(demodulate(np.zeros(16), cfg))

    def test_integer_tone(self):
        cfg = OfdmConfig(dft_size=16, cp_len=0)
        Y = demodulate(np.exp(2j * np.pi * np.arange(16) * 3 / 16), cfg)
        expected = np.zeros(16)
        expected[3] = 16
        np.testing.assert_allclose(Y, expected, atol=1e-12)

    def test_short_input(self):
        with pytest.raises(InputError):
            demodulate(np.zeros(17), OfdmConfig(dft_size=16, cp_len=2))


@settings(max_examples=60, deadline=None)
@given(log_n=st.integers(1, 10), cp_frac=st.floats(0, 0.99), seed=st.integers(0, 2 ** 32 - 1))
def test_round_trip_property(log_n, cp_frac, seed):
    n = 2 ** log_n
    cfg = OfdmConfig(dft_size=n, cp_len=int(cp_frac * n))
    X = _random_symbols(np.random.default_rng(seed), n)
    Y = demodulate(modulate(X, cfg), cfg)
    assert np.linalg.norm(Y - X) <= 1e-10 * np.linalg.norm(X)


@settings(max_examples=60, deadline=None)
@given(log_n=st.integers(1, 10), seed=st.integers(0, 2 ** 32 - 1))
def test_parseval_property(log_n, seed):
    n = 2 ** log_n
    cfg = OfdmConfig(dft_size=n, cp_len=n // 4)
    X = _random_symbols(np.random.default_rng(seed), n)
    body = modulate(X, cfg)[cfg.cp_len:]
    assert np.sum(np.abs(body) ** 2) == pytest.approx(np.sum(np.abs(X) ** 2) / n, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(log_n=st.integers(2, 10), cp_frac=st.floats(0, 0.99), seed=st.integers(0, 2 ** 32 - 1))
def test_cp_property(log_n, cp_frac, seed):
    n = 2 ** log_n
    cfg = OfdmConfig(dft_size=n, cp_len=int(cp_frac * n))
    x = modulate(_random_symbols(np.random.default_rng(seed), n), cfg)
    np.testing.assert_array_equal(x[: cfg.cp_len], x[x.size - cfg.cp_len:])


class TestIci:
    def test_zero_offset_is_identity(self):
        cfg = OfdmConfig(dft_size=32, cp_len=0)
        np.testing.assert_allclose(ici_profile(cfg, 0.0), np.eye(32), atol=1e-15)

    def test_half_subcarrier_matches_brute_force(self):
        cfg = OfdmConfig(dft_size=16, cp_len=4)
        X = _random_symbols(np.random.default_rng(5), 16)
        f = 0.5 * cfg.subcarrier_spacing_hz
        np.testing.assert_allclose(ici_profile(cfg, f) @ X, _ramp_pipeline(cfg, X, f), atol=1e-10)

    def test_integer_offset_is_cyclic_shift(self):
        cfg = OfdmConfig(dft_size=16, cp_len=0)
        M = ici_profile(cfg, cfg.subcarrier_spacing_hz)
        np.testing.assert_allclose(M, np.roll(np.eye(16), 1, axis=0), atol=1e-12)

    def test_rejects_offset_beyond_nyquist(self):
        cfg = OfdmConfig(dft_size=16, cp_len=0)
        with pytest.raises(ConfigurationError):
            ici_profile(cfg, cfg.sample_rate_hz / 2)

    @settings(max_examples=40, deadline=None)
    @given(eps=st.floats(-2.0, 2.0, exclude_min=True, exclude_max=True), seed=st.integers(0, 2 ** 32 - 1))
    def test_consistency_property(self, eps, seed):
        cfg = OfdmConfig(dft_size=64, cp_len=8)
        X = _random_symbols(np.random.default_rng(seed), 64)
        f = eps * cfg.subcarrier_spacing_hz
        np.testing.assert_allclose(ici_profile(cfg, f) @ X, _ramp_pipeline(cfg, X, f), atol=1e-8)

    def test_rows_conserve_energy(self):
        # the ramp is unitary on the body, so M is unitary
        M = ici_profile(OfdmConfig(dft_size=32, cp_len=0), 0.37 * 30e3)
        np.testing.assert_allclose(M.conj().T @ M, np.eye(32), atol=1e-12)
