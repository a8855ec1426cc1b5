"""Satellite downlink channel: taps, Doppler and oscillator ramp, AWGN, sampling drift.

Signals are complex ndarrays whose last axis is time. Channel outputs gain a
leading receive-antenna axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .constants import SPEED_OF_LIGHT
from .errors import ConfigurationError, InputError
from .ofdm import OfdmConfig


@dataclass(frozen=True)
class TapSpec:
    """One entry of a power-delay profile.

    A LOS tap has fixed magnitude and a uniformly random phase per antenna;
    other taps are Rayleigh (circular complex Gaussian).
    """

    delay_samples: int
    power_db: float
    los: bool = False

    def __post_init__(self):
        if int(self.delay_samples) != self.delay_samples or self.delay_samples < 0:
            raise ConfigurationError(f"tap delay must be a non-negative integer, got {self.delay_samples}")


SINGLE_TAP = (TapSpec(0, 0.0, los=True),)

# Implementation default, not measured data: a LOS-dominated Rician profile
# (about 11.7 dB K-factor) with normalized delays {0, 0, 0.56, 7.33} at a
# 100 ns delay spread, rounded to whole samples at 7.68 MHz.
DEFAULT_TAPS = (
    TapSpec(0, -0.284, los=True),
    TapSpec(0, -11.991),
    TapSpec(0, -9.887),
    TapSpec(6, -16.771),
)


@dataclass(frozen=True)
class ChannelConfig:
    """Fixed channel parameters for one trial.

    ``sampling_ratio`` is alpha = f_s / f_c; ``None`` derives it from the OFDM
    grid when drift is modelled. ``snr_db = inf`` disables noise.
    """

    relative_speed_mps: float = 0.0
    freq_offset_hz: float = 0.0
    taps: tuple = SINGLE_TAP
    snr_db: float = math.inf
    num_rx: int = 1
    sampling_ratio: float | None = None
    model_drift: bool = False

    def __post_init__(self):
        if self.num_rx < 1:
            raise ConfigurationError("num_rx must be >= 1")
        if not self.taps:
            raise ConfigurationError("at least one tap is required")
        if self.sampling_ratio is not None and self.sampling_ratio <= 0:
            raise ConfigurationError("sampling_ratio must be positive")


@dataclass(frozen=True)
class ChannelRealization:
    """Per-antenna tap gains frozen for one trial plus the trial's offsets."""

    gains: np.ndarray  # (num_rx, num_taps) complex
    delays: np.ndarray  # (num_taps,) int64
    relative_speed_mps: float
    freq_offset_hz: float
    sampling_ratio: float | None = None
    model_drift: bool = False
    snr_db: float = field(default=math.inf)

    @property
    def num_rx(self) -> int:
        return self.gains.shape[0]

    def composite_offset_hz(self, carrier_freq_hz: float, position_offset_hz: float = 0.0) -> float:
        """Oscillator offset plus Doppler at the absolute frequency f_c + f_p."""
        return self.freq_offset_hz + self.relative_speed_mps * (carrier_freq_hz + position_offset_hz) / SPEED_OF_LIGHT


def normalized_powers(taps) -> np.ndarray:
    p = np.array([10.0 ** (t.power_db / 10.0) for t in taps])
    return p / p.sum()


def realize(cfg: ChannelConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw per-antenna tap gains with unit average total power."""
    powers = normalized_powers(cfg.taps)
    los = np.array([t.los for t in cfg.taps])
    n_taps = len(cfg.taps)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(cfg.num_rx, n_taps))
    rayleigh = (rng.standard_normal((cfg.num_rx, n_taps)) + 1j * rng.standard_normal((cfg.num_rx, n_taps))) / np.sqrt(2.0)
    gains = np.where(los[None, :], np.exp(1j * phases), rayleigh) * np.sqrt(powers)[None, :]
    return ChannelRealization(
        gains=gains,
        delays=np.array([t.delay_samples for t in cfg.taps], dtype=np.int64),
        relative_speed_mps=cfg.relative_speed_mps,
        freq_offset_hz=cfg.freq_offset_hz,
        sampling_ratio=cfg.sampling_ratio,
        model_drift=cfg.model_drift,
        snr_db=cfg.snr_db,
    )


def fixed_realization(gains, delays, relative_speed_mps=0.0, freq_offset_hz=0.0, **kw) -> ChannelRealization:
    """Build a realization from explicit gains, shape (num_rx, num_taps)."""
    g = np.atleast_2d(np.asarray(gains, dtype=np.complex128))
    d = np.atleast_1d(np.asarray(delays, dtype=np.int64))
    if g.shape[1] != d.shape[0]:
        raise ConfigurationError("gains need one column per delay")
    return ChannelRealization(g, d, relative_speed_mps, freq_offset_hz, **kw)


def apply_channel(x: np.ndarray, real: ChannelRealization, cfg: OfdmConfig,
                  position_offset_hz: float = 0.0) -> np.ndarray:
    """Pass ``x`` through the taps and the composite frequency ramp.

    ``x`` is a single burst (L,) or a stack of independent bursts (B, L); the
    ramp restarts at n = 0 in every burst. The composite frequency is
    Delta f + v (f_c + f_p) / c. Returns shape (num_rx,) + x.shape.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.size == 0:
        raise InputError("empty signal")
    squeeze = x.ndim == 1
    x2 = np.ascontiguousarray(x.reshape(1, -1) if squeeze else x)
    if x2.ndim != 2:
        raise InputError(f"expected (L,) or (B, L) input, got shape {x.shape}")
    f = real.composite_offset_hz(cfg.carrier_freq_hz, position_offset_hz)
    y = kernels.apply_taps_ramp(
        x2, np.ascontiguousarray(real.delays), np.ascontiguousarray(real.gains), f * cfg.sample_interval
    )
    return y[:, 0, :] if squeeze else y


def noise_variance(y: np.ndarray, snr_db: float) -> np.ndarray:
    """Noise variance per antenna (leading axis) for a target SNR."""
    y = np.asarray(y)
    if y.ndim == 1:
        power = np.mean(np.abs(y) ** 2)
    else:
        power = np.mean(np.abs(y.reshape(y.shape[0], -1)) ** 2, axis=1)
    return power / 10.0 ** (snr_db / 10.0)


def add_noise(y: np.ndarray, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Add circular complex Gaussian noise at ``snr_db`` per antenna.

    Signal power is measured per leading index (antenna) when ``y`` has more
    than one axis, otherwise over the whole array.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.size == 0:
        raise InputError("empty signal")
    if math.isinf(snr_db) and snr_db > 0:
        return y.copy()
    var = noise_variance(y, snr_db)
    unit_noise = complex_normal(rng, y.shape)
    scale = np.sqrt(var)
    if y.ndim > 1:
        scale = scale.reshape((-1,) + (1,) * (y.ndim - 1))
    return y + scale * unit_noise


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circular complex Gaussian samples."""
    w = rng.standard_normal(tuple(shape) + (2,))
    return w.view(np.complex128)[..., 0] / np.sqrt(2.0)


DRIFT_HALF_WIDTH = 32
DRIFT_KAISER_BETA = 8.6


def drift_ratio(sample_rate_hz: float, alpha: float, freq_offset_hz: float) -> float:
    """T_s' / T_s for a receiver clocked at alpha (f_c - Delta f), f_c = f_s / alpha."""
    if alpha <= 0:
        raise ConfigurationError("alpha must be positive")
    carrier = sample_rate_hz / alpha
    actual_rate = alpha * (carrier - freq_offset_hz)
    if actual_rate <= 0:
        raise ConfigurationError("actual sampling rate is not positive")
    return sample_rate_hz / actual_rate


def apply_sampling_drift(y: np.ndarray, alpha: float, freq_offset_hz: float,
                         sample_rate_hz: float) -> np.ndarray:
    """Resample each burst at the receiver's drifted sampling instants.

    Output sample n is the band-limited interpolation of ``y`` at time
    n T_s', with T_s' = 1 / (alpha (f_c - Delta f)). The last axis is time and
    every other index is an independent burst starting at t = 0.
    """
    ratio = drift_ratio(sample_rate_hz, alpha, freq_offset_hz)
    if not 0.99 < ratio < 1.01:
        raise ConfigurationError(f"drift ratio {ratio:.6f} outside (0.99, 1.01)")
    y = np.asarray(y, dtype=np.complex128)
    if y.size == 0:
        raise InputError("empty signal")
    rows = np.ascontiguousarray(y.reshape(-1, y.shape[-1]))
    out = kernels.sinc_resample(rows, ratio, DRIFT_HALF_WIDTH, DRIFT_KAISER_BETA)
    return np.asarray(out).reshape(y.shape)
