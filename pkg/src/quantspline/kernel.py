"""Bernoulli polynomials and the periodic Sobolev reproducing kernel.

For the order-``m`` periodic Sobolev space on [0, 1],

    K(x, y)   = (-1)**(m - 1) * B_{2m}((x - y) mod 1) / (2m)!
    K2(x, y)  = int_0^1 K(x, u) K(u, y) du
              = (-1)**(2m - 1) * B_{4m}((x - y) mod 1) / (4m)!

Polynomial coefficients are generated exactly (``fractions.Fraction``) and
converted to floats once per order. Even-order polynomials are evaluated on
the reduced argument ``min(d, 1 - d)``, which keeps Horner's scheme on
[0, 1/2] and makes the kernels exactly symmetric in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from . import _backend
from .exceptions import UnsupportedOrderError

MAX_ORDER = 32
MAX_M = 8


@lru_cache(maxsize=None)
def bernoulli_numbers(nmax: int) -> tuple[Fraction, ...]:
    """B_0..B_nmax with the B_1 = -1/2 convention."""
    b = [Fraction(1)]
    for n in range(1, nmax + 1):
        s = sum(comb(n + 1, k) * b[k] for k in range(n))
        b.append(-s / (n + 1))
    return tuple(b)


def _check_order(order: int) -> int:
    if int(order) != order or not 0 <= order <= MAX_ORDER:
        raise UnsupportedOrderError(f"Bernoulli order must be an integer in [0, {MAX_ORDER}], got {order!r}")
    return int(order)


@lru_cache(maxsize=None)
def bernoulli_coefficients(order: int) -> tuple[Fraction, ...]:
    """Exact coefficients of B_order, highest power first."""
    order = _check_order(order)
    b = bernoulli_numbers(order)
    return tuple(comb(order, k) * b[k] for k in range(order + 1))


def bernoulli_poly_exact(order: int, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in bernoulli_coefficients(order):
        acc = acc * x + c
    return acc


def bernoulli_poly(order: int, x):
    """Evaluate the Bernoulli polynomial B_order at ``x`` (scalar or array)."""
    coeffs = np.array([float(c) for c in bernoulli_coefficients(order)])
    out = np.polyval(coeffs, np.asarray(x, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=None)
def _scaled_coefficients(order: int, sign: int) -> np.ndarray:
    scale = Fraction(sign, factorial(order))
    arr = np.array([float(scale * c) for c in bernoulli_coefficients(order)])
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class KernelSpec:
    """Spline order ``m`` and the kernels it induces."""

    m: int = 2

    def __post_init__(self):
        if int(self.m) != self.m or not 1 <= self.m <= MAX_M:
            raise UnsupportedOrderError(f"spline order m must be an integer in [1, {MAX_M}], got {self.m!r}")

    @property
    def factorial_scale_K(self) -> Fraction:
        return Fraction((-1) ** (self.m - 1), factorial(2 * self.m))

    @property
    def factorial_scale_K2(self) -> Fraction:
        return Fraction((-1) ** (2 * self.m - 1), factorial(4 * self.m))

    @property
    def coeffs_K(self) -> np.ndarray:
        """Float coefficients (highest power first) of K as a polynomial in the lag."""
        return _scaled_coefficients(2 * self.m, (-1) ** (self.m - 1))

    @property
    def coeffs_K2(self) -> np.ndarray:
        return _scaled_coefficients(4 * self.m, -1)

    def K_exact(self, lag: Fraction) -> Fraction:
        return self.factorial_scale_K * bernoulli_poly_exact(2 * self.m, lag % 1)

    def K2_exact(self, lag: Fraction) -> Fraction:
        return self.factorial_scale_K2 * bernoulli_poly_exact(4 * self.m, lag % 1)


def _periodic(coeffs, x, y):
    d = np.subtract(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    out = _backend.periodic_even_poly(coeffs, np.ascontiguousarray(d.ravel()))
    return float(out[0]) if d.ndim == 0 else out.reshape(d.shape)


def kernel_K(spec: KernelSpec, x, y):
    """Reproducing kernel K(x, y); broadcasts over array arguments."""
    return _periodic(spec.coeffs_K, x, y)


def kernel_K2(spec: KernelSpec, x, y):
    """Tensor kernel int K(x, u) K(u, y) du; broadcasts over array arguments."""
    return _periodic(spec.coeffs_K2, x, y)


def kernel_matrix(spec: KernelSpec, n: int, tensor: bool = False) -> np.ndarray:
    """Dense [K(i/n, j/n) / n] (or the K2 version) for i, j = 1..n."""
    grid = np.arange(1, n + 1) / n
    f = kernel_K2 if tensor else kernel_K
    return f(spec, grid[:, None], grid[None, :]) / n
