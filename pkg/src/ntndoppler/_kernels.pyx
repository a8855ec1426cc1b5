# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics mirror ``ntndoppler._fallback``."""
import numpy as np

from libc.math cimport M_PI, cos, fabs, floor, sin, sqrt


def corr_diff_metric(const double complex[:, ::1] x,
                     const double complex[:, :, ::1] y,
                     Py_ssize_t lag):
    cdef Py_ssize_t n_rx = y.shape[0], n_seg = y.shape[1], n = y.shape[2]
    cdef Py_ssize_t r, s, i
    cdef double mr = 0.0, mi = 0.0, energy = 0.0
    cdef double ar, ai, br, bi, xr, xi, yr, yi
    if x.shape[0] != n_seg or x.shape[1] != n:
        raise ValueError("x and y segment shapes differ")
    for r in range(n_rx):
        for s in range(n_seg):
            for i in range(n):
                xr = x[s, i].real
                xi = x[s, i].imag
                yr = y[r, s, i].real
                yi = y[r, s, i].imag
                # b = conj(x) * y
                br = xr * yr + xi * yi
                bi = xr * yi - xi * yr
                energy += br * br + bi * bi
                if i >= lag:
                    xr = x[s, i - lag].real
                    xi = x[s, i - lag].imag
                    yr = y[r, s, i - lag].real
                    yi = y[r, s, i - lag].imag
                    ar = xr * yr + xi * yi
                    ai = xr * yi - xi * yr
                    # conj(a) * b
                    mr += ar * br + ai * bi
                    mi += ar * bi - ai * br
    return complex(mr, mi), energy


def apply_taps_ramp(const double complex[:, ::1] x,
                    const long long[::1] delays,
                    const double complex[:, ::1] gains,
                    double cycles_per_sample):
    cdef Py_ssize_t n_bursts = x.shape[0], length = x.shape[1]
    cdef Py_ssize_t n_rx = gains.shape[0], n_taps = delays.shape[0]
    cdef Py_ssize_t r, b, i, t, d
    if gains.shape[1] != n_taps:
        raise ValueError("gains must have one column per delay")
    out_arr = np.zeros((n_rx, n_bursts, length), dtype=np.complex128)
    cdef double[:, :, ::1] out = out_arr.view(np.float64).reshape(n_rx, n_bursts, 2 * length)
    cdef const double[:, ::1] xf = np.asarray(x).view(np.float64)
    cdef double[::1] cr = np.empty(length), ci = np.empty(length)
    cdef double w, gr, gi, xr, xi, yr, yi
    for i in range(length):
        w = 2.0 * M_PI * cycles_per_sample * i
        cr[i] = cos(w)
        ci[i] = sin(w)
    for r in range(n_rx):
        for b in range(n_bursts):
            for t in range(n_taps):
                d = delays[t]
                gr = gains[r, t].real
                gi = gains[r, t].imag
                for i in range(d, length):
                    xr = xf[b, 2 * (i - d)]
                    xi = xf[b, 2 * (i - d) + 1]
                    out[r, b, 2 * i] += gr * xr - gi * xi
                    out[r, b, 2 * i + 1] += gr * xi + gi * xr
            for i in range(length):
                yr = out[r, b, 2 * i]
                yi = out[r, b, 2 * i + 1]
                out[r, b, 2 * i] = yr * cr[i] - yi * ci[i]
                out[r, b, 2 * i + 1] = yr * ci[i] + yi * cr[i]
    return out_arr


cdef double _bessel_i0(double v) nogil:
    cdef double term = 1.0, total = 1.0, q = 0.25 * v * v
    cdef int k = 1
    while term > 1e-17 * total:
        term *= q / (k * k)
        total += term
        k += 1
    return total


def sinc_resample(const double complex[:, ::1] y, double ratio,
                  Py_ssize_t half_width, double beta):
    cdef Py_ssize_t rows = y.shape[0], length = y.shape[1]
    cdef Py_ssize_t row, i, m, base, idx
    cdef double t, tau, h, arg, norm = _bessel_i0(beta)
    cdef double complex acc
    out_arr = np.zeros((rows, length), dtype=np.complex128)
    taps_arr = np.empty(2 * half_width, dtype=np.float64)
    cdef double complex[:, ::1] out = out_arr
    cdef double[::1] taps = taps_arr
    for i in range(length):
        t = i * ratio
        base = <Py_ssize_t>floor(t)
        for m in range(2 * half_width):
            tau = t - (base - half_width + 1 + m)
            if fabs(tau) >= half_width:
                taps[m] = 0.0
                continue
            if fabs(tau) < 1e-15:
                h = 1.0
            else:
                h = sin(M_PI * tau) / (M_PI * tau)
            arg = 1.0 - (tau / half_width) * (tau / half_width)
            taps[m] = h * _bessel_i0(beta * sqrt(arg)) / norm
        for row in range(rows):
            acc = 0.0
            for m in range(2 * half_width):
                idx = base - half_width + 1 + m
                if 0 <= idx < length:
                    acc = acc + taps[m] * y[row, idx]
            out[row, i] = acc
    return out_arr
