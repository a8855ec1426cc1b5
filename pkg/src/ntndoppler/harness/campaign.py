"""Seeded Monte Carlo campaigns over SNR and frequency separation.

Trial ``i`` draws everything random (offsets, tap gains, unit noise) from a
generator seeded by ``(seed, i)`` before looking at the sweep cell, so every
cell sees the same draws (common random numbers) and any subset of trials or
cells reproduces exactly, regardless of how trials are scheduled.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..channel import (ChannelConfig, apply_channel, apply_sampling_drift, complex_normal,
                       noise_variance, realize)
from ..constants import PRECOMP_FRACTION, SPEED_OF_LIGHT
from ..errors import EstimationError
from ..estimator import iir_update, measure_positions, solve_measurements
from ..refsig import PositionSet, ReferenceSignalSpec, generate_bursts
from .config import CampaignConfig


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    snr_db: float
    separation_hz: float
    true_freq_offset_hz: float
    true_speed_mps: float
    est_freq_offset_hz: float = math.nan
    est_speed_mps: float = math.nan
    doppler_error_hz: float = math.nan
    failed: bool = False
    message: str = ""


@dataclass
class CellStats:
    snr_db: float
    separation_hz: float
    trials: int
    failures: int
    abs_errors: np.ndarray  # sorted, failures as +inf
    signed_errors: np.ndarray  # successful trials only, trial order
    threshold_hz: float

    @property
    def successes(self) -> int:
        return self.trials - self.failures

    @property
    def max_error_hz(self) -> float:
        finite = self.abs_errors[: self.successes]
        return float(finite.max()) if finite.size else math.nan

    @property
    def mean_abs_error_hz(self) -> float:
        finite = self.abs_errors[: self.successes]
        return float(finite.mean()) if finite.size else math.nan

    @property
    def within_fraction(self) -> float:
        return self.cdf(self.threshold_hz)

    def cdf(self, err_hz: float) -> float:
        """Fraction of all trials (failures count as infinite error) with |error| <= err_hz."""
        return float(np.searchsorted(self.abs_errors, err_hz, side="right")) / self.trials

    def quantile(self, q: float) -> float:
        """Smallest |error| e with cdf(e) >= q."""
        if q <= 0:
            return float(self.abs_errors[0])
        k = int(math.ceil(q * self.trials - 1e-9)) - 1
        return float(self.abs_errors[min(max(k, 0), self.trials - 1)])


@dataclass
class CampaignStats:
    cells: list = field(default_factory=list)
    records: list = field(default_factory=list)

    def cell(self, snr_db: float, separation_hz: float) -> CellStats:
        for c in self.cells:
            if c.snr_db == snr_db and c.separation_hz == separation_hz:
                return c
        raise KeyError((snr_db, separation_hz))


def precompensation_threshold_hz(subcarrier_spacing_hz: float) -> float:
    return PRECOMP_FRACTION * subcarrier_spacing_hz


def check_precompensation(record: TrialRecord, subcarrier_spacing_hz: float) -> tuple[bool, float]:
    """Residual uplink frequency error after pre-compensation and whether it is tolerable."""
    if record.failed:
        return False, math.inf
    residual = abs(record.doppler_error_hz)
    return residual <= precompensation_threshold_hz(subcarrier_spacing_hz), residual


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial_index)]))


def grid_cells(cfg: CampaignConfig):
    return [(snr, sep) for snr in cfg.snr_sweep_db for sep in cfg.positions.separations_hz]


def _template(cfg: CampaignConfig) -> ReferenceSignalSpec:
    r = cfg.refsig
    return ReferenceSignalSpec(0.0, r.bandwidth_subcarriers, r.sequence_seed, r.num_symbols)


def position_set(cfg: CampaignConfig, separation_hz: float) -> PositionSet:
    ps = PositionSet.symmetric(separation_hz, cfg.ofdm.carrier_freq_hz, _template(cfg),
                               carrier_bandwidth_hz=cfg.positions.carrier_bandwidth_hz)
    ps.validate(cfg.ofdm)
    return ps


@lru_cache(maxsize=64)
def _references(spec: ReferenceSignalSpec, ofdm, num_bursts: int, grid_center_hz: float) -> np.ndarray:
    x = generate_bursts(spec, ofdm, num_bursts, grid_center_hz)[1]
    x.setflags(write=False)
    return x


def _grid_centers(cfg: CampaignConfig, specs) -> list:
    if cfg.positions.mode == "narrowband":
        return [s.position_offset_hz for s in specs]
    return [0.0] * len(specs)


def _received_streams(cfg, specs, refs, real, grid_centers):
    """Noiseless received signal per stream: one per position (narrowband) or one shared."""
    ofdm = cfg.ofdm
    outs = [apply_channel(x, real, ofdm, s.position_offset_hz) for s, x in zip(specs, refs)]
    if cfg.positions.mode == "wideband":
        outs = [sum(outs)]
    if cfg.channel.model_drift:
        outs = [apply_sampling_drift(y, cfg.alpha, real.freq_offset_hz, ofdm.sample_rate_hz) for y in outs]
    return outs


def _estimate(cfg, received, specs, refs, grid_centers):
    """LS estimate, IIR-smoothed across ``iir_updates`` equal groups of bursts."""
    est_cfg = cfg.estimator_config()
    guard = cfg.extraction_guard()
    groups = cfg.estimator.iir_updates
    per = cfg.refsig.num_bursts // groups
    tracked = None
    for g in range(groups):
        sl = slice(g * per, (g + 1) * per)
        ys = [y[:, sl] for y in received]
        xs = [x[sl] for x in refs]
        ms = measure_positions(ys, specs, xs, cfg.ofdm, est_cfg, grid_centers, guard)
        e = solve_measurements(ms, cfg.ofdm, est_cfg)
        tracked = e if tracked is None else iir_update(tracked, e, est_cfg.iir_gamma)
    return tracked


def run_trial_cells(cfg: CampaignConfig, trial_index: int, cells=None) -> list:
    """Run one trial index through every (snr_db, separation_hz) cell."""
    cells = grid_cells(cfg) if cells is None else list(cells)
    ofdm = cfg.ofdm
    f_c = ofdm.carrier_freq_hz
    rng = trial_rng(cfg.seed, trial_index)
    df = rng.uniform(*cfg.channel.offset_ppm_range) * 1e-6 * f_c
    v = rng.uniform(*cfg.channel.doppler_ppm_range) * 1e-6 * SPEED_OF_LIGHT
    real = realize(ChannelConfig(v, df, cfg.channel.taps, num_rx=cfg.channel.num_rx), rng)
    n_streams = 2 if cfg.positions.mode == "narrowband" else 1
    burst_len = cfg.refsig.num_symbols * ofdm.symbol_len
    shape = (cfg.channel.num_rx, cfg.refsig.num_bursts, burst_len)
    unit_noise = [complex_normal(rng, shape) for _ in range(n_streams)]

    by_sep = {}
    for snr, sep in cells:
        by_sep.setdefault(sep, []).append(snr)
    results = {}
    for sep, snrs in by_sep.items():
        specs = position_set(cfg, sep).specs
        centers = _grid_centers(cfg, specs)
        refs = [_references(s, ofdm, cfg.refsig.num_bursts, c) for s, c in zip(specs, centers)]
        clean = _received_streams(cfg, specs, refs, real, centers)
        for snr in snrs:
            if math.isinf(snr) and snr > 0:
                received = clean
            else:
                received = [y + np.sqrt(noise_variance(y, snr)).reshape(-1, 1, 1) * w
                            for y, w in zip(clean, unit_noise)]
            if cfg.positions.mode == "wideband":
                received = received * len(specs)
            base = dict(trial_index=trial_index, snr_db=snr, separation_hz=sep,
                        true_freq_offset_hz=df, true_speed_mps=v)
            try:
                e = _estimate(cfg, received, specs, refs, centers)
            except EstimationError as exc:
                results[(snr, sep)] = TrialRecord(**base, failed=True, message=str(exc))
                continue
            results[(snr, sep)] = TrialRecord(
                **base, est_freq_offset_hz=e.freq_offset_hz, est_speed_mps=e.speed_mps,
                doppler_error_hz=(e.speed_mps - v) * f_c / SPEED_OF_LIGHT,
            )
    return [results[c] for c in cells]


def run_trial(cfg: CampaignConfig, trial_index: int, snr_db: float | None = None,
              separation_hz: float | None = None) -> TrialRecord:
    """One trial at one cell (defaults: first SNR, first separation)."""
    snr = cfg.snr_sweep_db[0] if snr_db is None else snr_db
    sep = cfg.positions.separations_hz[0] if separation_hz is None else separation_hz
    return run_trial_cells(cfg, trial_index, [(snr, sep)])[0]


def _run_chunk(args):
    cfg, indices, cells = args
    return [run_trial_cells(cfg, i, cells) for i in indices]


def aggregate(records_by_trial, cells, threshold_hz: float) -> list:
    stats = []
    for j, (snr, sep) in enumerate(cells):
        recs = [r[j] for r in records_by_trial]
        ok = [r for r in recs if not r.failed]
        abs_err = np.sort(np.array([abs(r.doppler_error_hz) for r in ok] + [math.inf] * (len(recs) - len(ok))))
        stats.append(CellStats(snr, sep, len(recs), len(recs) - len(ok), abs_err,
                               np.array([r.doppler_error_hz for r in ok]), threshold_hz))
    return stats


def run_campaign(cfg: CampaignConfig, cells=None, progress=None, keep_records: bool = False) -> CampaignStats:
    """Execute ``cfg.trials`` trials over the cells and aggregate per-cell statistics.

    ``progress`` is called as ``progress(done, total)`` after each chunk.
    """
    cells = grid_cells(cfg) if cells is None else list(cells)
    n = cfg.trials
    chunk = max(1, min(100, n // (4 * cfg.workers) or 1))
    jobs = [(cfg, range(s, min(s + chunk, n)), cells) for s in range(0, n, chunk)]
    by_trial = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for out in pool.map(_run_chunk, jobs):
                by_trial.extend(out)
                if progress:
                    progress(len(by_trial), n)
    else:
        for job in jobs:
            by_trial.extend(_run_chunk(job))
            if progress:
                progress(len(by_trial), n)
    stats = CampaignStats(aggregate(by_trial, cells, precompensation_threshold_hz(cfg.ofdm.subcarrier_spacing_hz)))
    if keep_records:
        stats.records = by_trial
    return stats
