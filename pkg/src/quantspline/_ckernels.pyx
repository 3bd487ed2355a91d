# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for periodic kernel evaluation.

Both functions take the kernel as the coefficients of an even periodic
polynomial (highest power first) in the reduced argument
``u = min(frac(|d|), 1 - frac(|d|))``.
"""
import numpy as np

from libc.math cimport fabs, floor


cdef inline double _reduce(double d) noexcept nogil:
    d = fabs(d)
    d = d - floor(d)
    if d > 0.5:
        d = 1.0 - d
    return d


cdef inline double _horner(const double[::1] c, Py_ssize_t deg, double u) noexcept nogil:
    cdef double acc = c[0]
    cdef Py_ssize_t p
    for p in range(1, deg + 1):
        acc = acc * u + c[p]
    return acc


def periodic_even_poly(const double[::1] coeffs, const double[::1] d):
    cdef Py_ssize_t j, q = d.shape[0]
    cdef Py_ssize_t deg = coeffs.shape[0] - 1
    out = np.empty(q, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for j in range(q):
            o[j] = _horner(coeffs, deg, _reduce(d[j]))
    return out


def kernel_sum(const double[::1] theta, const double[::1] coeffs, const double[::1] x):
    """out[j] = sum_i theta[i] * P(reduce((i + 1) / n - x[j]))."""
    cdef Py_ssize_t n = theta.shape[0]
    cdef Py_ssize_t q = x.shape[0]
    cdef Py_ssize_t deg = coeffs.shape[0] - 1
    cdef Py_ssize_t i, j
    cdef double acc, xj, dn = <double>n
    out = np.empty(q, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for j in range(q):
            xj = x[j]
            acc = 0.0
            for i in range(n):
                acc = acc + theta[i] * _horner(coeffs, deg, _reduce((i + 1) / dn - xj))
            o[j] = acc
    return out
