"""Known reference signals at several frequency positions of the carrier.

Each position is a block of QPSK subcarriers centred at f_c + f_p. A position
can be placed on a grid centred anywhere (``grid_center_hz``): the harness
simulates every position in its own narrowband grid centred on f_p, while a
wideband grid centred on the carrier holds all positions at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError
from .ofdm import OfdmConfig, demodulate, modulate

SUBCARRIERS_PER_RB = 12


@dataclass(frozen=True)
class ReferenceSignalSpec:
    position_offset_hz: float = 0.0
    bandwidth_subcarriers: int = 20 * SUBCARRIERS_PER_RB
    sequence_seed: int = 0
    num_symbols: int = 4

    def __post_init__(self):
        k = self.bandwidth_subcarriers
        if k <= 0 or k % 2:
            raise ConfigurationError(f"bandwidth_subcarriers must be positive and even, got {k}")
        if self.num_symbols < 1:
            raise ConfigurationError("num_symbols must be >= 1")

    def bandwidth_hz(self, cfg: OfdmConfig) -> float:
        return self.bandwidth_subcarriers * cfg.subcarrier_spacing_hz


@dataclass(frozen=True)
class PositionSet:
    """Ordered reference-signal positions sharing one carrier.

    ``carrier_bandwidth_hz`` (W) is optional; when given, every position must
    fit inside the carrier.
    """

    specs: tuple
    carrier_freq_hz: float
    carrier_bandwidth_hz: float | None = None

    def validate(self, cfg: OfdmConfig) -> None:
        if len(self.specs) < 2:
            raise ConfigurationError("at least two frequency positions are required")
        offsets = [s.position_offset_hz for s in self.specs]
        if len(set(offsets)) != len(offsets):
            raise ConfigurationError("frequency positions must be distinct")
        order = sorted(self.specs, key=lambda s: s.position_offset_hz)
        for lo, hi in zip(order, order[1:]):
            gap = (hi.position_offset_hz - lo.position_offset_hz) - (lo.bandwidth_hz(cfg) + hi.bandwidth_hz(cfg)) / 2
            if gap < -1e-6:
                raise ConfigurationError(
                    f"positions at {lo.position_offset_hz:g} Hz and {hi.position_offset_hz:g} Hz overlap"
                )
        if self.carrier_bandwidth_hz is not None:
            for s in self.specs:
                if abs(s.position_offset_hz) + s.bandwidth_hz(cfg) / 2 > self.carrier_bandwidth_hz / 2 + 1e-6:
                    raise ConfigurationError(
                        f"position {s.position_offset_hz:g} Hz does not fit a {self.carrier_bandwidth_hz:g} Hz carrier"
                    )

    @classmethod
    def symmetric(cls, separation_hz: float, carrier_freq_hz: float, template: ReferenceSignalSpec,
                  **kw) -> "PositionSet":
        """Two positions at -sep/2 and +sep/2 around the carrier, seeds s and s + 1."""
        specs = tuple(
            ReferenceSignalSpec(sign * separation_hz / 2, template.bandwidth_subcarriers,
                                template.sequence_seed + i, template.num_symbols)
            for i, sign in enumerate((-1.0, 1.0))
        )
        return cls(specs, carrier_freq_hz, **kw)


def subcarrier_indices(spec: ReferenceSignalSpec, cfg: OfdmConfig, grid_center_hz: float = 0.0,
                       guard: int = 0) -> np.ndarray:
    """DFT bin indices (mod N) of the position, widened by ``guard`` bins per side."""
    n = cfg.dft_size
    center = (spec.position_offset_hz - grid_center_hz) / cfg.subcarrier_spacing_hz
    if abs(center - round(center)) > 1e-6:
        raise ConfigurationError(
            f"position offset {spec.position_offset_hz:g} Hz is not on the {cfg.subcarrier_spacing_hz:g} Hz grid"
        )
    center = int(round(center))
    half = spec.bandwidth_subcarriers // 2
    if abs(center) + half > n // 2:
        raise ConfigurationError(
            f"{spec.bandwidth_subcarriers} subcarriers at bin {center} do not fit an N={n} grid"
        )
    lo = center - half - guard
    hi = center + half + guard  # exclusive
    if hi - lo >= n:
        return np.arange(n)
    return np.arange(lo, hi) % n


def qpsk_sequence(seed: int, burst_index: int, shape) -> np.ndarray:
    rng = np.random.default_rng([int(seed), int(burst_index)])
    bits = rng.integers(0, 2, size=tuple(shape) + (2,))
    return ((1 - 2 * bits[..., 0]) + 1j * (1 - 2 * bits[..., 1])) / np.sqrt(2.0)


def generate(spec: ReferenceSignalSpec, cfg: OfdmConfig, grid_center_hz: float = 0.0,
             burst_index: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Frequency-domain symbols (num_symbols, N) and the burst waveform.

    The waveform is the CP-OFDM symbols laid end to end, length
    num_symbols * (N_cp + N). Content is a deterministic function of
    (sequence_seed, burst_index).
    """
    idx = subcarrier_indices(spec, cfg, grid_center_hz)
    X = np.zeros((spec.num_symbols, cfg.dft_size), dtype=np.complex128)
    X[:, idx] = qpsk_sequence(spec.sequence_seed, burst_index, (spec.num_symbols, idx.size))
    return X, modulate(X, cfg).reshape(-1)


def generate_bursts(spec: ReferenceSignalSpec, cfg: OfdmConfig, num_bursts: int,
                    grid_center_hz: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Stack of ``num_bursts`` bursts: symbols (B, S, N) and waveforms (B, S * (N_cp + N))."""
    pairs = [generate(spec, cfg, grid_center_hz, b) for b in range(num_bursts)]
    return np.stack([p[0] for p in pairs]), np.stack([p[1] for p in pairs])


def extract_position(y: np.ndarray, spec: ReferenceSignalSpec, cfg: OfdmConfig,
                     grid_center_hz: float = 0.0, guard: int | None = 0) -> np.ndarray:
    """Band-pass ``y`` to the position's subcarriers, keeping sample alignment.

    Each CP-OFDM symbol is demodulated, bins outside the position (widened by
    ``guard`` bins per side; ``None`` passes the whole grid) are zeroed, and the
    symbol is re-modulated with a fresh cyclic prefix. The last axis of ``y``
    must hold a whole number of symbols.
    """
    y = np.asarray(y, dtype=np.complex128)
    L = cfg.symbol_len
    if y.ndim == 0 or y.shape[-1] < L or y.shape[-1] % L:
        raise InputError(f"last axis must hold whole {L}-sample symbols, got shape {y.shape}")
    sym = y.reshape(y.shape[:-1] + (y.shape[-1] // L, L))
    if guard is None:
        idx = np.arange(cfg.dft_size)
    else:
        idx = subcarrier_indices(spec, cfg, grid_center_hz, guard)
    cp = cfg.cp_len
    if idx.size == cfg.dft_size:
        out = sym.copy()
        if cp:
            out[..., :cp] = sym[..., L - cp:]
        return out.reshape(y.shape)
    Y = demodulate(sym, cfg)
    mask = np.zeros(cfg.dft_size, dtype=bool)
    mask[idx] = True
    Y[..., ~mask] = 0.0
    return modulate(Y, cfg).reshape(y.shape)
