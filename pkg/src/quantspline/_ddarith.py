"""Vectorized double-double arithmetic (about 32 significant digits).

Values are carried as (hi, lo) pairs of float64 arrays with |lo| <= ulp(hi)/2.
Only what the extended-precision DFT oracle needs is provided.
"""

from fractions import Fraction

import mpmath
import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd_add(ahi, alo, bhi, blo):
    s, e = two_sum(ahi, bhi)
    t, f = two_sum(alo, blo)
    e = e + t
    s, e = fast_two_sum(s, e)
    e = e + f
    return fast_two_sum(s, e)


def dd_mul(ahi, alo, bhi, blo):
    p, e = two_prod(ahi, bhi)
    e = e + (ahi * blo + alo * bhi)
    return fast_two_sum(p, e)


def from_fraction(q: Fraction):
    hi = float(q)
    return hi, float(q - Fraction(hi))


def cos_table(n: int):
    """cos(2*pi*j/n) for j = 0..n-1 as double-double arrays."""
    hi = np.empty(n)
    lo = np.empty(n)
    with mpmath.workdps(40):
        for j in range(n):
            v = mpmath.cos(2 * mpmath.pi * j / n)
            h = float(v)
            hi[j] = h
            lo[j] = float(v - h)
    return hi, lo


def even_dft(row_hi, row_lo):
    """Real DFT sum_l row[l] cos(2 pi l r / n) for r = 0..n-1, in double-double."""
    n = row_hi.shape[0]
    chi, clo = cos_table(n)
    r = np.arange(n)
    acc_hi = np.zeros(n)
    acc_lo = np.zeros(n)
    for l in range(n):
        idx = (l * r) % n
        th, tl = dd_mul(np.full(n, row_hi[l]), np.full(n, row_lo[l]), chi[idx], clo[idx])
        acc_hi, acc_lo = dd_add(acc_hi, acc_lo, th, tl)
    return acc_hi, acc_lo
