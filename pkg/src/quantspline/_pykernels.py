"""Pure-numpy twins of the routines in ``_ckernels.pyx``."""

import numpy as np

# Caps the temporary (query x design) block at ~4M doubles.
_BLOCK = 1 << 22


def _reduce(d):
    d = np.abs(d)
    d = d - np.floor(d)
    return np.where(d > 0.5, 1.0 - d, d)


def _horner(coeffs, u):
    acc = np.full_like(u, coeffs[0])
    for c in coeffs[1:]:
        acc = acc * u + c
    return acc


def periodic_even_poly(coeffs, d):
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    return _horner(coeffs, _reduce(d))


def kernel_sum(theta, coeffs, x):
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = theta.shape[0]
    design = np.arange(1, n + 1) / float(n)
    out = np.empty(x.shape[0])
    step = max(1, _BLOCK // max(n, 1))
    for start in range(0, x.shape[0], step):
        xs = x[start:start + step]
        vals = _horner(coeffs, _reduce(design[None, :] - xs[:, None]))
        out[start:start + step] = vals @ theta
    return out
