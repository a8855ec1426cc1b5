"""Pure-numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` module; used when
the extension is not built or ``NTNDOPPLER_PURE_PYTHON`` is set.
"""
import numpy as np


def corr_diff_metric(x, y, lag):
    """Fused conjugate product and lag-``lag`` differential sum.

    ``x`` is (S, N), ``y`` is (R, S, N); each length-N row is one contiguous
    segment and products never straddle rows. Returns ``(metric, energy)``
    with metric = sum conj(z[n-lag]) z[n], z = conj(x) y, and energy = sum |z|^2.
    """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    z = np.conj(x) * y
    metric = np.sum(np.conj(z[..., :-lag]) * z[..., lag:])
    energy = np.sum(z.real ** 2 + z.imag ** 2)
    return complex(metric), float(energy)


def apply_taps_ramp(x, delays, gains, cycles_per_sample):
    """Multi-tap filter followed by a common phase ramp, per antenna.

    ``x`` is (B, L) with each row an independent burst (zero before its start),
    ``delays`` is (T,) int, ``gains`` is (R, T) complex. Returns (R, B, L):
    out[r, b, n] = exp(j 2 pi f n) * sum_t gains[r, t] * x[b, n - delays[t]].
    """
    x = np.asarray(x, dtype=np.complex128)
    gains = np.asarray(gains, dtype=np.complex128)
    n_rx = gains.shape[0]
    n_bursts, length = x.shape
    out = np.zeros((n_rx, n_bursts, length), dtype=np.complex128)
    for t, d in enumerate(np.asarray(delays, dtype=np.int64)):
        if d >= length:
            continue
        shifted = x[:, :length - d] if d else x
        out[:, :, d:] += gains[:, t, None, None] * shifted[None]
    ramp = np.exp(2j * np.pi * cycles_per_sample * np.arange(length))
    out *= ramp
    return out


def sinc_resample(y, ratio, half_width, beta):
    """Band-limited interpolation of each row of ``y`` at instants n * ratio.

    Uses a Kaiser-windowed sinc of ``half_width`` taps per side; samples
    outside a row are treated as zero. Output rows have the input length.
    """
    y = np.asarray(y, dtype=np.complex128)
    length = y.shape[-1]
    t = np.arange(length) * ratio
    base = np.floor(t).astype(np.int64)
    offsets = np.arange(-half_width + 1, half_width + 1)
    idx = base[:, None] + offsets[None, :]
    tau = t[:, None] - idx
    h = np.sinc(tau) * np.i0(beta * np.sqrt(np.clip(1.0 - (tau / half_width) ** 2, 0.0, None)))
    h /= np.i0(beta)
    h[np.abs(tau) >= half_width] = 0.0
    valid = (idx >= 0) & (idx < length)
    h = np.where(valid, h, 0.0)
    gathered = y[..., np.clip(idx, 0, length - 1)]
    return np.einsum("...ij,ij->...i", gathered, h)
