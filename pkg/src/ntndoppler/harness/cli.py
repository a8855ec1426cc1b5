"""Command-line entry point.

    ntndoppler run   [--config PATH] [--seed N] [--trials N] [--out PATH]
    ntndoppler sweep --axis {snr,separation} [--config PATH] [...]
    ntndoppler check [--config PATH]

Exit status: 0 success, 1 configuration error, 2 runtime or I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time

from ..errors import ConfigurationError
from ..kernels import BACKEND
from .campaign import grid_cells, run_campaign
from .config import CampaignConfig, load
from .report import emit_csv, summary_table

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("ntndoppler")


def _common(top: bool) -> argparse.ArgumentParser:
    # sub-level copies must not overwrite values given before the subcommand
    kw = {} if top else {"default": argparse.SUPPRESS}
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON campaign configuration (defaults used when omitted)", **kw)
    common.add_argument("--verbose", "-v", action="store_true", help="print per-cell progress", **kw)
    return common


def _parser() -> argparse.ArgumentParser:
    common = _common(top=False)

    run_opts = argparse.ArgumentParser(add_help=False)
    run_opts.add_argument("--seed", type=int, help="campaign seed (unsigned 64-bit)")
    run_opts.add_argument("--trials", type=int, help="trials per cell")
    run_opts.add_argument("--out", help="CSV output path")
    run_opts.add_argument("--workers", type=int, help="worker processes")

    p = argparse.ArgumentParser(prog="ntndoppler", description=__doc__.split("\n\n")[0],
                                parents=[_common(top=True)])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common, run_opts], help="full SNR x separation grid")
    sw = sub.add_parser("sweep", parents=[common, run_opts],
                        help="one axis: all SNRs at the first separation, or all separations at the first SNR")
    sw.add_argument("--axis", choices=("snr", "separation"), required=True)
    sub.add_parser("check", parents=[common], help="validate the config and print resolved defaults")
    return p


def _load(args) -> CampaignConfig:
    cfg = load(args.config) if args.config else CampaignConfig()
    over = {}
    if getattr(args, "seed", None) is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        over["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        over["trials"] = args.trials
    if getattr(args, "out", None) is not None:
        over["output_path"] = args.out
    if getattr(args, "workers", None) is not None:
        over["workers"] = args.workers
    return dataclasses.replace(cfg, **over) if over else cfg


def _cells(cfg: CampaignConfig, axis: str | None):
    if axis == "snr":
        return [(s, cfg.positions.separations_hz[0]) for s in cfg.snr_sweep_db]
    if axis == "separation":
        return [(cfg.snr_sweep_db[0], d) for d in cfg.positions.separations_hz]
    return grid_cells(cfg)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False
    try:
        return _dispatch(args)
    finally:
        log.removeHandler(handler)


def _dispatch(args) -> int:
    try:
        cfg = _load(args)
    except (ConfigurationError, ValueError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "check":
        print(json.dumps(cfg.to_dict(), indent=2))
        return EXIT_OK

    cells = _cells(cfg, getattr(args, "axis", None))
    log.info("backend=%s cells=%d trials=%d seed=%d", BACKEND, len(cells), cfg.trials, cfg.seed)
    t0 = time.perf_counter()

    def progress(done, total):
        log.info("trials %d/%d (%.1fs)", done, total, time.perf_counter() - t0)

    try:
        stats = run_campaign(cfg, cells, progress=progress if args.verbose else None)
        for c in stats.cells:
            log.info("cell snr=%g dB sep=%g MHz: within=%.4f mean=%.1f Hz",
                     c.snr_db, c.separation_hz / 1e6, c.within_fraction, c.mean_abs_error_hz)
        emit_csv(stats, cfg.output_path, cfg.quantiles)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(summary_table(stats))
    print(f"wrote {cfg.output_path}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
