"""OFDM grid definition, CP-OFDM modulation/demodulation and the ICI leakage matrix.

Conventions: the IDFT carries the 1/N factor and the DFT is unscaled, so an
ideal channel maps X[k] back to X[k] exactly. Subcarrier indices run 0..N-1;
time-domain signals are complex ndarrays sampled at ``OfdmConfig.sample_rate_hz``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError


@dataclass(frozen=True)
class OfdmConfig:
    """Grid geometry of one OFDM numerology.

    Attributes:
        subcarrier_spacing_hz: B in Hz.
        dft_size: N, a power of two.
        cp_len: cyclic prefix length in samples, 0 <= cp_len < N.
        carrier_freq_hz: carrier frequency f_c in Hz.
    """

    subcarrier_spacing_hz: float = 30e3
    dft_size: int = 256
    cp_len: int = 18
    carrier_freq_hz: float = 2e9

    def __post_init__(self):
        n = self.dft_size
        if not isinstance(n, (int, np.integer)) or n < 2 or n & (n - 1):
            raise ConfigurationError(f"dft_size must be a power of two >= 2, got {n!r}")
        if not 0 <= self.cp_len < n:
            raise ConfigurationError(f"cp_len must lie in [0, {n}), got {self.cp_len}")
        if self.subcarrier_spacing_hz <= 0:
            raise ConfigurationError("subcarrier_spacing_hz must be positive")
        if self.carrier_freq_hz <= 0:
            raise ConfigurationError("carrier_freq_hz must be positive")

    @property
    def sample_rate_hz(self) -> float:
        return self.dft_size * self.subcarrier_spacing_hz

    @property
    def sample_interval(self) -> float:
        """T_s = 1/(N B) in seconds."""
        return 1.0 / (self.dft_size * self.subcarrier_spacing_hz)

    @property
    def symbol_len(self) -> int:
        """Samples per CP-prefixed OFDM symbol."""
        return self.cp_len + self.dft_size


def modulate(symbols: np.ndarray, cfg: OfdmConfig) -> np.ndarray:
    """IDFT + cyclic prefix.

    ``symbols`` has shape (..., N); the result has shape (..., N_cp + N) where
    output index i corresponds to time index n = i - N_cp. Leading axes are
    independent symbols.
    """
    X = np.asarray(symbols)
    if X.ndim == 0 or X.shape[-1] != cfg.dft_size:
        raise ConfigurationError(
            f"expected {cfg.dft_size} subcarriers on the last axis, got shape {X.shape}"
        )
    x = np.fft.ifft(X.astype(np.complex128, copy=False), axis=-1)
    if cfg.cp_len == 0:
        return x
    return np.concatenate([x[..., -cfg.cp_len:], x], axis=-1)


def demodulate(signal: np.ndarray, cfg: OfdmConfig) -> np.ndarray:
    """Strip the cyclic prefix and take the unscaled N-point DFT.

    ``signal`` has shape (..., L) with L >= N_cp + N; samples past N_cp + N on
    the last axis are ignored.
    """
    y = np.asarray(signal)
    if y.ndim == 0 or y.shape[-1] < cfg.symbol_len:
        raise InputError(
            f"need at least {cfg.symbol_len} samples per symbol, got shape {y.shape}"
        )
    body = y[..., cfg.cp_len:cfg.cp_len + cfg.dft_size]
    return np.fft.fft(body.astype(np.complex128, copy=False), axis=-1)


def ici_profile(cfg: OfdmConfig, composite_offset_hz: float) -> np.ndarray:
    """Leakage matrix M with Y = M @ X for a residual frequency offset.

    Entry (k, l) is the Dirichlet coefficient multiplying X[l] in Y[k] when the
    received samples carry the ramp exp(j 2 pi f n T_s), f = composite_offset_hz.
    """
    fs = cfg.sample_rate_hz
    if not abs(composite_offset_hz) < fs / 2:
        raise ConfigurationError(
            f"|offset| must be below f_s/2 = {fs / 2:g} Hz, got {composite_offset_hz:g}"
        )
    n = cfg.dft_size
    eps = composite_offset_hz / cfg.subcarrier_spacing_hz
    k = np.arange(n)
    m = k[None, :] - k[:, None]
    u = m + eps  # l - k + eps
    phase = np.exp(1j * np.pi * u * (1.0 - 1.0 / n))
    # sin(pi (m + eps)) = (-1)^m sin(pi eps), exactly zero for integer eps
    num = np.where(m % 2, -1.0, 1.0) * np.sin(np.pi * eps)
    den = np.sin(np.pi * u / n)
    singular = np.abs(den) < 1e-12
    # u -> m N: ratio tends to N cos(pi u) / cos(pi u / N)
    safe_den = np.where(singular, 1.0, den)
    ratio = np.where(singular, n * np.cos(np.pi * u) / np.cos(np.pi * u / n), num / safe_den)
    return phase * ratio / n
