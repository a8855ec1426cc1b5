"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Shapes match one campaign trial at the default configuration: 2 antennas,
64 bursts of 4 symbols, N = 256, D = 32.
"""
import argparse
import timeit

import numpy as np

from ntndoppler import _fallback
from ntndoppler.channel import DEFAULT_TAPS
from ntndoppler.kernels import compiled


def _cplx(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def cases():
    rng = np.random.default_rng(0)
    x_body = _cplx(rng, (256, 256))
    y_body = _cplx(rng, (2, 256, 256))
    bursts = _cplx(rng, (64, 4 * 274))
    delays = np.array([t.delay_samples for t in DEFAULT_TAPS], dtype=np.int64)
    gains = _cplx(rng, (2, len(DEFAULT_TAPS)))
    rows = _cplx(rng, (128, 4 * 274))
    return {
        "corr_diff_metric": lambda k: k.corr_diff_metric(x_body, y_body, 32),
        "apply_taps_ramp": lambda k: k.apply_taps_ramp(bursts, delays, gains, 0.005),
        "sinc_resample": lambda k: k.sinc_resample(rows, 1.0000105, 32, 8.6),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'kernel':<18} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name, fn in cases().items():
        py = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat)) * 1e3
        if compiled is None:
            print(f"{name:<18} {py:>10.2f} {'-':>10} {'-':>8}")
            continue
        cy = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<18} {py:>10.2f} {cy:>10.2f} {py / cy:>7.1f}x")


if __name__ == "__main__":
    main()
