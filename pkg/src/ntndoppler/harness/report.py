"""CSV and plain-text renderings of campaign statistics."""
from __future__ import annotations

import csv
import io
import math

QUANTILE_HEADER = ["snr_db", "separation_hz", "quantile", "abs_error_hz"]
SUMMARY_HEADER = ["snr_db", "separation_hz", "trials", "failures", "max_error_hz",
                  "mean_abs_error_hz", "within_threshold_fraction"]


def _num(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return repr(float(x))


def render_csv(stats, quantiles) -> str:
    """Quantile rows per cell, then a ``# summary`` section; header only when there are no cells."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(QUANTILE_HEADER)
    if not stats.cells:
        return buf.getvalue()
    for c in stats.cells:
        for q in quantiles:
            w.writerow([_num(c.snr_db), _num(c.separation_hz), _num(q), _num(c.quantile(q))])
    buf.write("# summary\n")
    w.writerow(SUMMARY_HEADER)
    for c in stats.cells:
        w.writerow([_num(c.snr_db), _num(c.separation_hz), c.trials, c.failures,
                    _num(c.max_error_hz), _num(c.mean_abs_error_hz), _num(c.within_fraction)])
    return buf.getvalue()


def emit_csv(stats, path, quantiles) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(stats, quantiles))


def summary_table(stats) -> str:
    lines = [f"{'SNR dB':>7} {'sep MHz':>8} {'trials':>7} {'fail':>5} {'within':>8} {'mean Hz':>9} {'max Hz':>9}"]
    for c in stats.cells:
        lines.append(
            f"{c.snr_db:>7.1f} {c.separation_hz / 1e6:>8.0f} {c.trials:>7d} {c.failures:>5d} "
            f"{100 * c.within_fraction:>7.2f}% {c.mean_abs_error_hz:>9.1f} {c.max_error_hz:>9.1f}"
        )
    return "\n".join(lines)
