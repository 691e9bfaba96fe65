# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  See ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def symmetric_support_index(const double[::1] power, double eta):
    cdef Py_ssize_t n = power.shape[0]
    cdef Py_ssize_t c = n // 2
    cdef Py_ssize_t k
    cdef double total = 0.0
    cdef double acc
    for k in range(n):
        total += power[k]
    cdef double target = (1.0 - eta) * total
    acc = power[c]
    if acc >= target:
        return 0
    for k in range(1, c + 1):
        if c + k < n:
            acc += power[c + k]
        acc += power[c - k]
        if acc >= target:
            return k
    return c


def window_energies(const double[::1] power,
                    const cnp.int64_t[::1] starts,
                    const cnp.int64_t[::1] lengths,
                    const cnp.int64_t[::1] offsets,
                    const double[::1] values):
    cdef Py_ssize_t K = starts.shape[0]
    cdef Py_ssize_t k, i, s, m, o
    cdef double acc
    out = np.empty(K, dtype=np.float64)
    cdef double[::1] out_v = out
    for k in range(K):
        s = starts[k]
        m = lengths[k]
        o = offsets[k]
        acc = 0.0
        for i in range(m):
            acc += power[s + i] * values[o + i]
        out_v[k] = acc
    return out


def window_max_abs_diff(const double[::1] a, const double[::1] b):
    cdef Py_ssize_t i
    cdef double d, best = 0.0
    for i in range(a.shape[0]):
        d = fabs(a[i] - b[i])
        if d > best:
            best = d
    return best
