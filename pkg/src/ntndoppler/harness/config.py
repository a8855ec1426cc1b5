"""Campaign configuration: JSON document <-> dataclasses.

Every field is optional; missing fields take the defaults below. Unknown keys
raise ``ConfigurationError`` so typos are caught early.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..channel import DEFAULT_TAPS, TapSpec
from ..constants import SPEED_OF_LIGHT
from ..errors import ConfigurationError
from ..estimator import EstimatorConfig, ambiguity_limit
from ..ofdm import OfdmConfig

log = logging.getLogger(__name__)

DEFAULT_SEPARATIONS_HZ = (288e6, 576e6, 864e6, 1152e6, 1440e6, 1728e6, 2016e6)
DEFAULT_SNR_DB = (-3.0, 1.0, 5.0, 9.0, 13.0)
DEFAULT_QUANTILES = tuple(round(0.05 * i, 2) for i in range(1, 21))


@dataclass(frozen=True)
class ChannelRanges:
    doppler_ppm_range: tuple = (-24.5, 24.5)
    offset_ppm_range: tuple = (-10.5, 10.5)
    taps: tuple = DEFAULT_TAPS
    num_rx: int = 2
    model_drift: bool = False
    sampling_ratio: float | None = None


@dataclass(frozen=True)
class RefsigSettings:
    bandwidth_subcarriers: int = 240
    num_symbols: int = 4
    num_bursts: int = 64
    sequence_seed: int = 0
    extraction_guard_subcarriers: int | None = None


@dataclass(frozen=True)
class PositionSettings:
    separations_hz: tuple = DEFAULT_SEPARATIONS_HZ
    mode: str = "narrowband"
    carrier_bandwidth_hz: float | None = None


@dataclass(frozen=True)
class EstimatorSettings:
    lag: int = 32
    iir_gamma: float = 0.5
    iir_updates: int = 1
    drift_aware: bool = False
    alpha: float | None = None


@dataclass(frozen=True)
class CampaignConfig:
    ofdm: OfdmConfig = OfdmConfig()
    channel: ChannelRanges = ChannelRanges()
    refsig: RefsigSettings = RefsigSettings()
    positions: PositionSettings = PositionSettings()
    estimator: EstimatorSettings = EstimatorSettings()
    snr_sweep_db: tuple = DEFAULT_SNR_DB
    trials: int = 2000
    seed: int = 20210
    quantiles: tuple = DEFAULT_QUANTILES
    output_path: str = "doppler_errors.csv"
    workers: int = 1

    def __post_init__(self):
        validate(self)

    @property
    def alpha(self) -> float:
        """Sampling-rate to carrier ratio used by the channel and the estimator."""
        if self.estimator.alpha is not None:
            return self.estimator.alpha
        if self.channel.sampling_ratio is not None:
            return self.channel.sampling_ratio
        return self.ofdm.sample_rate_hz / self.ofdm.carrier_freq_hz

    def estimator_config(self) -> EstimatorConfig:
        e = self.estimator
        return EstimatorConfig(e.lag, e.iir_gamma, e.drift_aware, self.alpha if e.drift_aware else None)

    def extraction_guard(self) -> int | None:
        g = self.refsig.extraction_guard_subcarriers
        if g is not None:
            return g
        if self.positions.mode == "narrowband":
            return None  # the position is alone in its grid: pass everything
        limit = ambiguity_limit(self.estimator_config(), self.ofdm.sample_interval)
        return int(math.ceil(limit / self.ofdm.subcarrier_spacing_hz))

    def max_composite_offset_hz(self) -> float:
        f_c = self.ofdm.carrier_freq_hz
        df = max(abs(x) for x in self.channel.offset_ppm_range) * 1e-6 * f_c
        v = max(abs(x) for x in self.channel.doppler_ppm_range) * 1e-6 * SPEED_OF_LIGHT
        return df + v * (f_c + max(self.positions.separations_hz) / 2) / SPEED_OF_LIGHT

    def with_overrides(self, **kw) -> "CampaignConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["channel"]["taps"] = [dataclasses.asdict(t) for t in self.channel.taps]
        return _lists(d)


def _lists(obj):
    if isinstance(obj, dict):
        return {k: _lists(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_lists(v) for v in obj]
    return obj


def validate(cfg: CampaignConfig) -> None:
    if cfg.trials < 1:
        raise ConfigurationError("trials must be >= 1")
    if not cfg.snr_sweep_db:
        raise ConfigurationError("snr_sweep_db must not be empty")
    if not cfg.positions.separations_hz:
        raise ConfigurationError("separations_hz must not be empty")
    if any(s <= 0 for s in cfg.positions.separations_hz):
        raise ConfigurationError("separations must be positive")
    if cfg.positions.mode not in ("narrowband", "wideband"):
        raise ConfigurationError(f"mode must be 'narrowband' or 'wideband', got {cfg.positions.mode!r}")
    for name in ("doppler_ppm_range", "offset_ppm_range"):
        r = getattr(cfg.channel, name)
        if len(r) != 2 or r[0] > r[1]:
            raise ConfigurationError(f"{name} must be [low, high] with low <= high, got {r}")
    if cfg.channel.num_rx < 1:
        raise ConfigurationError("num_rx must be >= 1")
    if not cfg.channel.taps:
        raise ConfigurationError("at least one tap is required")
    if cfg.refsig.num_bursts < 1:
        raise ConfigurationError("num_bursts must be >= 1")
    if cfg.estimator.iir_updates < 1 or cfg.refsig.num_bursts % cfg.estimator.iir_updates:
        raise ConfigurationError("iir_updates must be >= 1 and divide num_bursts")
    if cfg.estimator.lag >= cfg.ofdm.dft_size:
        raise ConfigurationError("lag must be below the DFT size")
    if not all(0.0 <= q <= 1.0 for q in cfg.quantiles):
        raise ConfigurationError("quantiles must lie in [0, 1]")
    if cfg.workers < 1:
        raise ConfigurationError("workers must be >= 1")
    cfg.estimator_config()  # range checks on lag / gamma / alpha
    limit = ambiguity_limit(cfg.estimator_config(), cfg.ofdm.sample_interval)
    worst = cfg.max_composite_offset_hz()
    if worst >= limit:
        log.warning("worst-case composite offset %.0f Hz exceeds the %.0f Hz ambiguity limit; "
                    "estimates will wrap", worst, limit)


def _build(cls, data, where):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigurationError(f"section '{where}' must be an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigurationError(f"unknown key(s) in '{where}': {', '.join(unknown)}")
    kw = {}
    for k, v in data.items():
        kw[k] = tuple(v) if isinstance(v, list) else v
    try:
        return cls(**kw)
    except TypeError as exc:
        raise ConfigurationError(f"bad value in '{where}': {exc}") from exc


def _taps(raw):
    if not isinstance(raw, list) or not raw:
        raise ConfigurationError("channel.taps must be a non-empty list")
    return tuple(_build(TapSpec, t, "channel.taps[]") for t in raw)


def from_dict(data: dict) -> CampaignConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a JSON object")
    top = {f.name for f in dataclasses.fields(CampaignConfig)}
    unknown = sorted(set(data) - top)
    if unknown:
        raise ConfigurationError(f"unknown top-level key(s): {', '.join(unknown)}")
    kw = {}
    if "ofdm" in data:
        kw["ofdm"] = _build(OfdmConfig, data["ofdm"], "ofdm")
    if "channel" in data:
        ch = dict(data["channel"] or {})
        taps = _taps(ch.pop("taps")) if "taps" in ch else None
        built = _build(ChannelRanges, ch, "channel")
        kw["channel"] = dataclasses.replace(built, taps=taps) if taps else built
    for key, cls in (("refsig", RefsigSettings), ("positions", PositionSettings), ("estimator", EstimatorSettings)):
        if key in data:
            kw[key] = _build(cls, data[key], key)
    for key in ("snr_sweep_db", "quantiles"):
        if key in data:
            if not isinstance(data[key], list):
                raise ConfigurationError(f"{key} must be a list")
            kw[key] = tuple(float(x) for x in data[key])
    for key in ("trials", "seed", "workers"):
        if key in data:
            if not isinstance(data[key], int) or isinstance(data[key], bool):
                raise ConfigurationError(f"{key} must be an integer")
            kw[key] = data[key]
    if "output_path" in data:
        kw["output_path"] = str(data["output_path"])
    return CampaignConfig(**kw)


def load(path) -> CampaignConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    return from_dict(data)
