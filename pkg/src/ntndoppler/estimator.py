"""Joint estimation of oscillator offset and relative speed.

Each frequency position yields one noisy linear equation

    Delta f + v (f_c + f_p) / c = Phase(sum_n conj(z_p[n-D]) z_p[n]) / (2 pi D T_s)

with z_p = conj(x_p) y_p. Stacking P >= 2 positions gives A e = b, solved by
least squares for e = [Delta f, v].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .constants import SPEED_OF_LIGHT
from .errors import ConfigurationError, EstimationError, InputError
from .ofdm import OfdmConfig
from .refsig import extract_position

# Metric magnitudes below this fraction of the correlation energy are treated as no signal.
FAILURE_RATIO = 1e-12


@dataclass(frozen=True)
class EstimatorConfig:
    """Receiver parameters.

    Attributes:
        lag: differential lag D in samples.
        iir_gamma: smoothing factor of the first-order IIR tracker, in [0, 1].
        drift_aware: use the sampling-drift-corrected system matrix.
        alpha: f_s / f_c; required when ``drift_aware``.
    """

    lag: int = 32
    iir_gamma: float = 0.5
    drift_aware: bool = False
    alpha: float | None = None

    def __post_init__(self):
        if int(self.lag) != self.lag or self.lag < 1:
            raise ConfigurationError(f"lag must be an integer >= 1, got {self.lag}")
        if not 0.0 <= self.iir_gamma <= 1.0:
            raise ConfigurationError(f"iir_gamma must lie in [0, 1], got {self.iir_gamma}")
        if self.drift_aware and (self.alpha is None or self.alpha <= 0):
            raise ConfigurationError("drift_aware needs a positive alpha")


@dataclass(frozen=True)
class PositionMeasurement:
    position_offset_hz: float
    composite_estimate_hz: float
    metric_magnitude: float
    phase_rad: float


@dataclass(frozen=True)
class JointEstimate:
    freq_offset_hz: float
    speed_mps: float
    carrier_freq_hz: float
    condition_number: float = math.nan

    @property
    def doppler_at_carrier_hz(self) -> float:
        return self.speed_mps * self.carrier_freq_hz / SPEED_OF_LIGHT


def correlate(y_p: np.ndarray, x_p: np.ndarray) -> np.ndarray:
    """Element-wise conj(x_p) * y_p."""
    y_p = np.asarray(y_p)
    x_p = np.asarray(x_p)
    if y_p.shape[-1] != x_p.shape[-1]:
        raise InputError(f"length mismatch: {y_p.shape} vs {x_p.shape}")
    return np.conj(x_p) * y_p


def differential_metric(z: np.ndarray, lag: int) -> complex:
    """Sum of conj(z[n - lag]) z[n] along the last axis, summed over all other axes.

    Rows of a multi-dimensional ``z`` are separate segments; no product spans two rows.
    """
    z = np.asarray(z)
    if z.shape[-1] <= lag:
        raise InputError(f"segment length {z.shape[-1]} must exceed lag {lag}")
    return complex(np.sum(np.conj(z[..., :-lag]) * z[..., lag:]))


def ambiguity_limit(cfg: EstimatorConfig, sample_interval: float) -> float:
    """Largest composite offset (Hz) that does not wrap: 1 / (2 D T_s)."""
    return 1.0 / (2.0 * cfg.lag * sample_interval)


def measurement_from_metric(metric: complex, energy: float, lag: int, sample_interval: float,
                            position_offset_hz: float = 0.0) -> PositionMeasurement:
    mag = abs(metric)
    if not energy > 0 or mag < FAILURE_RATIO * energy:
        raise EstimationError(
            f"no usable signal at position {position_offset_hz:g} Hz (|metric|={mag:.3g}, energy={energy:.3g})"
        )
    phase = math.atan2(metric.imag, metric.real)
    if phase == -math.pi:
        phase = math.pi  # principal value in (-pi, pi]
    return PositionMeasurement(position_offset_hz, phase / (2.0 * math.pi * lag * sample_interval), mag, phase)


def per_position_estimate(z_p: np.ndarray, cfg: EstimatorConfig, sample_interval: float,
                          position_offset_hz: float = 0.0) -> PositionMeasurement:
    z_p = np.asarray(z_p)
    metric = differential_metric(z_p, cfg.lag)
    energy = float(np.sum(np.abs(z_p) ** 2))
    return measurement_from_metric(metric, energy, cfg.lag, sample_interval, position_offset_hz)


def build_system(measurements, carrier_freq_hz: float,
                 cfg: EstimatorConfig) -> tuple[np.ndarray, np.ndarray]:
    """Rows [1, (f_c + f_p) / c] and right-hand side b_p.

    With ``cfg.drift_aware`` the first column becomes 1 + alpha Phase_p / (2 pi D).
    """
    if len(measurements) < 2:
        raise EstimationError("at least two positions are needed to separate offset and speed")
    offsets = [m.position_offset_hz for m in measurements]
    if len(set(offsets)) != len(offsets):
        raise EstimationError("duplicate frequency positions make the system rank deficient")
    A = np.empty((len(measurements), 2))
    b = np.empty(len(measurements))
    for i, m in enumerate(measurements):
        first = 1.0
        if cfg.drift_aware:
            first += cfg.alpha * m.phase_rad / (2.0 * math.pi * cfg.lag)
        A[i] = first, (carrier_freq_hz + m.position_offset_hz) / SPEED_OF_LIGHT
        b[i] = m.composite_estimate_hz
    return A, b


def solve_ls(A: np.ndarray, b: np.ndarray, carrier_freq_hz: float) -> JointEstimate:
    """Least squares via the 2x2 normal equations."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[1] != 2 or A.shape[0] != b.shape[0]:
        raise InputError(f"expected A (P, 2) and b (P,), got {A.shape} and {b.shape}")
    G = A.T @ A
    det = G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]
    if not abs(det) > 1e-12 * (G[0, 0] + G[1, 1]) ** 2:
        raise EstimationError("system matrix is rank deficient")
    G_inv = np.array([[G[1, 1], -G[0, 1]], [-G[1, 0], G[0, 0]]]) / det
    e = G_inv @ (A.T @ b)
    return JointEstimate(float(e[0]), float(e[1]), carrier_freq_hz, float(np.linalg.cond(A)))


def iir_update(prev: JointEstimate, new: JointEstimate, gamma: float) -> JointEstimate:
    """(1 - gamma) prev + gamma new, component-wise."""
    if not 0.0 <= gamma <= 1.0:
        raise ConfigurationError(f"gamma must lie in [0, 1], got {gamma}")
    return JointEstimate(
        (1.0 - gamma) * prev.freq_offset_hz + gamma * new.freq_offset_hz,
        (1.0 - gamma) * prev.speed_mps + gamma * new.speed_mps,
        new.carrier_freq_hz,
        new.condition_number,
    )


def position_metric(y_p: np.ndarray, x_p: np.ndarray, ofdm: OfdmConfig, lag: int) -> tuple[complex, float]:
    """Differential metric of one position summed over antennas, bursts and symbols.

    ``y_p`` is (..., L_burst) with antennas and bursts on the leading axes;
    ``x_p`` is the matching reference, (L_burst,) or (B, L_burst). Only
    CP-stripped symbol bodies are used.
    """
    L = ofdm.symbol_len
    n = ofdm.dft_size
    if lag >= n:
        raise ConfigurationError(f"lag {lag} must be below the DFT size {n}")
    x_p = np.asarray(x_p, dtype=np.complex128)
    y_p = np.asarray(y_p, dtype=np.complex128)
    if y_p.shape[-x_p.ndim:] != x_p.shape:
        raise InputError(f"received shape {y_p.shape} does not end with reference shape {x_p.shape}")
    if x_p.shape[-1] % L:
        raise InputError(f"burst length {x_p.shape[-1]} is not a whole number of {L}-sample symbols")
    xb = np.ascontiguousarray(x_p.reshape(-1, L)[:, ofdm.cp_len:])
    yb = np.ascontiguousarray(y_p.reshape((-1,) + xb.shape[:1] + (L,))[..., ofdm.cp_len:])
    return kernels.corr_diff_metric(xb, yb, lag)


def measure_positions(received, specs, references, ofdm: OfdmConfig, cfg: EstimatorConfig,
                      grid_centers=None, guard: int | None = 0):
    """Extract, correlate and measure every position.

    ``received[p]`` holds position p's received signal (antennas leading),
    ``references[p]`` its transmitted burst(s). ``grid_centers[p]`` is the
    centre of the grid the position was received on (default: the carrier).
    """
    if not (len(received) == len(specs) == len(references)):
        raise InputError("received, specs and references must have one entry per position")
    if grid_centers is None:
        grid_centers = [0.0] * len(specs)
    out = []
    for y, spec, x, gc in zip(received, specs, references, grid_centers):
        y_p = extract_position(y, spec, ofdm, gc, guard)
        metric, energy = position_metric(y_p, x, ofdm, cfg.lag)
        out.append(measurement_from_metric(metric, energy, cfg.lag, ofdm.sample_interval, spec.position_offset_hz))
    return out


def solve_measurements(measurements, ofdm: OfdmConfig, cfg: EstimatorConfig) -> JointEstimate:
    A, b = build_system(measurements, ofdm.carrier_freq_hz, cfg)
    return solve_ls(A, b, ofdm.carrier_freq_hz)


def estimate(received, specs, references, ofdm: OfdmConfig, cfg: EstimatorConfig,
             grid_centers=None, guard: int | None = 0) -> JointEstimate:
    """End-to-end joint estimate from all positions; any failed position fails the estimate."""
    ms = measure_positions(received, specs, references, ofdm, cfg, grid_centers, guard)
    return solve_measurements(ms, ofdm, cfg)

