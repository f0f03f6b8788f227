# cython: language_level=3
"""Compiled direct-sum kernels.

Both kernels evaluate the full discrete convolution sum term by term, so they
carry none of the round-off that an FFT spreads into low-density tails. Each
output entry is a dot product of ``a`` with the reversed ``b``; four
independent accumulators let the compiler keep the pipeline full.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _dot(const double* x, const double* y, Py_ssize_t n) noexcept nogil:
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t i = 0
    while i + 4 <= n:
        s0 += x[i] * y[i]
        s1 += x[i + 1] * y[i + 1]
        s2 += x[i + 2] * y[i + 2]
        s3 += x[i + 3] * y[i + 3]
        i += 4
    while i < n:
        s0 += x[i] * y[i]
        i += 1
    return (s0 + s1) + (s2 + s3)


cdef void _conv(const double* a, Py_ssize_t na, const double* br, Py_ssize_t nb, double* out) noexcept nogil:
    # out[k] = sum_i a[i] b[k-i] = sum_i a[i] br[nb-1-k+i]
    cdef Py_ssize_t k, lo, hi
    for k in range(na + nb - 1):
        lo = k - nb + 1 if k >= nb else 0
        hi = k if k < na - 1 else na - 1
        out[k] = _dot(a + lo, br + (nb - 1 - k + lo), hi - lo + 1)


def direct_convolve(const double[::1] a, const double[::1] b):
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    rev = np.ascontiguousarray(np.asarray(b)[::-1])
    cdef const double[::1] br = rev
    out = np.empty(na + nb - 1, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        _conv(&a[0], na, &br[0], nb, &o[0])
    return out


def joint_sums(const double[::1] f1, const double[::1] g1, const double[::1] f2):
    """Return (sum_i g1[i] f2[k-i], sum_i f1[i] f2[k-i]) for every k."""
    cdef Py_ssize_t na = f1.shape[0], nb = f2.shape[0]
    if g1.shape[0] != na:
        raise ValueError("f1 and g1 must have the same length")
    rev = np.ascontiguousarray(np.asarray(f2)[::-1])
    cdef const double[::1] br = rev
    num = np.empty(na + nb - 1, dtype=np.float64)
    den = np.empty(na + nb - 1, dtype=np.float64)
    cdef double[::1] n_ = num
    cdef double[::1] d_ = den
    with nogil:
        _conv(&g1[0], na, &br[0], nb, &n_[0])
        _conv(&f1[0], na, &br[0], nb, &d_[0])
    return num, den
