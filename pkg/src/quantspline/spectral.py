"""Joint circulant eigendecomposition of the kernel matrices.

On the equispaced design i/n both Sigma = [K(i/n, j/n)/n] and
Omega = [K2(i/n, j/n)/n] are symmetric circulant, so they are diagonalized by
the unitary Fourier basis. Throughout the package the transform convention is

    v_hat = fft(v) / sqrt(n)

(unitary, so Parseval holds with no extra factors). With this convention
``v @ A @ v == sum(xi * abs(v_hat)**2)`` for A = (Sigma + lam I)^-1 Omega
(Sigma + lam I)^-1 and xi_l = lam_d[l] / (lam + lam_c[l])**2.

Eigenvalues come from one of three routes:

* ``series`` (default): aliased power sums, summed directly for ``num_terms``
  terms with an Euler-Maclaurin tail. All terms are positive, so every
  eigenvalue keeps full relative precision however small it is.
* ``row``: transform of the first matrix row. In double precision the
  high-frequency eigenvalues lose relative accuracy (they sit up to ~17
  orders of magnitude below the row entries), so the oracle variant runs the
  transform in double-double arithmetic from exact rational row entries.
* ``dense``: explicit matrices, for n <= 256 only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, pi

import numpy as np

from . import _ddarith
from .exceptions import DimensionError, InvalidPenaltyError, TooFewPointsError
from .kernel import KernelSpec, kernel_K, kernel_K2, kernel_matrix

DENSE_MAX_N = 256

# Even-index Bernoulli numbers B_2, B_4, B_6, B_8 for the Euler-Maclaurin tail.
_EM_B = (1 / 6, -1 / 30, 1 / 42, -1 / 30)


def _rising(s: float, q: int) -> float:
    out = 1.0
    for j in range(q):
        out *= s + j
    return out


def _aliased_sum(a: np.ndarray, n: int, s: int, num_terms: int):
    """sum_{k>=0} (k n + a)^(-s) for each offset a > 0, with a tail-error bound."""
    k = np.arange(num_terms - 1, -1, -1, dtype=np.float64)[:, None]
    direct = np.sum((k * n + a[None, :]) ** (-float(s)), axis=0)
    x0 = num_terms * n + a
    ratio = n / x0
    corr = x0 / (n * (s - 1.0)) + 0.5
    for j in range(1, 4):
        corr = corr + _EM_B[j - 1] / factorial(2 * j) * _rising(s, 2 * j - 1) * ratio ** (2 * j - 1)
    tail = x0 ** (-float(s)) * corr
    bound = x0 ** (-float(s)) * abs(_EM_B[3] / factorial(8) * _rising(s, 7)) * ratio**7
    return direct + tail, bound


def _series(n: int, s: int, num_terms: int):
    l = np.arange(n, dtype=np.float64)
    left = np.where(l == 0, n, n - l)
    right = np.where(l == 0, n, l)
    hl, bl = _aliased_sum(left, n, s, num_terms)
    hr, br = _aliased_sum(right, n, s, num_terms)
    scale = (2 * pi) ** (-float(s))
    return scale * (hl + hr), scale * (bl + br)


def eigenvalues_from_series(n: int, m: int, num_terms: int = 64):
    """Eigenvalues of Sigma and Omega from their aliased Fourier series.

    lam_c[l] = sum_{k>=1} (2 pi (k n - l))^(-2m) + sum_{k>=0} (2 pi (k n + l))^(-2m)
    for 1 <= l < n, lam_c[0] = 2 sum_{k>=1} (2 pi k n)^(-2m); lam_d likewise with
    exponent 4m.
    """
    if n < 2:
        raise TooFewPointsError("need n >= 2")
    if num_terms < 1:
        raise ValueError("num_terms must be >= 1")
    lam_c, _ = _series(n, 2 * m, num_terms)
    lam_d, _ = _series(n, 4 * m, num_terms)
    return lam_c, lam_d


def series_tail_bound(n: int, m: int, num_terms: int = 64) -> float:
    """Largest relative error bound of the Euler-Maclaurin tail over all l."""
    out = 0.0
    for s in (2 * m, 4 * m):
        val, bound = _series(n, s, num_terms)
        out = max(out, float(np.max(bound / val)))
    return out


def kernel_rows(n: int, spec: KernelSpec):
    """Exact first rows c_l = K(0, l/n)/n and d_l = K2(0, l/n)/n as Fractions."""
    c = [spec.K_exact(Fraction(-l, n)) / n for l in range(n)]
    d = [spec.K2_exact(Fraction(-l, n)) / n for l in range(n)]
    return c, d


def eigenvalues_from_row(n: int, spec: KernelSpec, precision: str = "extended"):
    """Eigenvalues as the transform of the first rows of Sigma and Omega.

    ``precision="extended"`` evaluates the rows exactly and transforms them in
    double-double arithmetic (O(n^2)); ``"double"`` uses ``numpy.fft`` and
    also returns the largest imaginary part seen.
    """
    if n < 2:
        raise TooFewPointsError("need n >= 2")
    if precision == "double":
        lag = -np.arange(n) / n
        fc = np.fft.fft(kernel_K(spec, 0.0, lag) / n)
        fd = np.fft.fft(kernel_K2(spec, 0.0, lag) / n)
        imag = max(np.max(np.abs(fc.imag)), np.max(np.abs(fd.imag)))
        return fc.real, fd.real, float(imag)
    if precision != "extended":
        raise ValueError(f"unknown precision {precision!r}")
    c, d = kernel_rows(n, spec)
    out = []
    for row in (c, d):
        pairs = [_ddarith.from_fraction(q) for q in row]
        hi = np.array([p[0] for p in pairs])
        lo = np.array([p[1] for p in pairs])
        rh, rl = _ddarith.even_dft(hi, lo)
        vals = rh + rl
        # frequency 0 is the row sum, which cancels ~19 digits; take it exactly
        vals[0] = float(sum(row, Fraction(0)))
        out.append(vals)
    return out[0], out[1]


@lru_cache(maxsize=64)
def _cached_eigenvalues(n: int, m: int, num_terms: int):
    lam_c, lam_d = eigenvalues_from_series(n, m, num_terms)
    lam_c.setflags(write=False)
    lam_d.setflags(write=False)
    return lam_c, lam_d


def eigenvalues(n: int, m: int, num_terms: int = 64):
    """Cached production eigenvalues (series route); read-only arrays."""
    return _cached_eigenvalues(int(n), int(m), int(num_terms))


def unitary_fft(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    return np.fft.fft(v) / np.sqrt(v.shape[0])


@dataclass(frozen=True, eq=False)
class SpectralQuantities:
    n: int
    m: int
    lam: float
    lam_c: np.ndarray
    lam_d: np.ndarray
    xi: np.ndarray
    trace_A: float
    trace_A2: float
    s_n: float
    h: float

    @property
    def s_n_sq(self) -> float:
        return self.s_n**2

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "lambda": self.lam,
            "trace_A": self.trace_A,
            "trace_A2": self.trace_A2,
            "s_n": self.s_n,
            "h": self.h,
        }


def dense_operators(n: int, m: int, lam: float) -> dict:
    """Explicit Sigma, Omega, A and smoother matrix (oracle use, n <= 256)."""
    if n > DENSE_MAX_N:
        raise DimensionError(f"dense operators limited to n <= {DENSE_MAX_N}")
    spec = KernelSpec(m)
    sigma = kernel_matrix(spec, n)
    omega = kernel_matrix(spec, n, tensor=True)
    inv = np.linalg.inv(sigma + lam * np.eye(n))
    return {
        "Sigma": sigma,
        "Omega": omega,
        "A": inv @ omega @ inv,
        "smoother": sigma @ inv,
    }


def build_spectral(n: int, m: int, lam: float, method: str = "series", num_terms: int = 64) -> SpectralQuantities:
    if not lam > 0:
        raise InvalidPenaltyError(f"penalty must be positive, got {lam!r}")
    if method == "series":
        lam_c, lam_d = eigenvalues(n, m, num_terms)
    elif method == "row":
        lam_c, lam_d = eigenvalues_from_row(n, KernelSpec(m))
    elif method == "dense":
        ops = dense_operators(n, m, lam)
        F = np.fft.fft(np.eye(n)) / np.sqrt(n)
        lam_c = np.real(np.einsum("li,ij,lj->l", F.conj(), ops["Sigma"], F))
        lam_d = np.real(np.einsum("li,ij,lj->l", F.conj(), ops["Omega"], F))
        A = ops["A"]
        off = A - np.diag(np.diag(A))
        return SpectralQuantities(
            n=n,
            m=m,
            lam=float(lam),
            lam_c=lam_c,
            lam_d=lam_d,
            xi=lam_d / (lam + lam_c) ** 2,
            trace_A=float(np.trace(A)),
            trace_A2=float(np.sum(A * A)),
            s_n=float(np.sqrt(2.0 * np.sum(off * off))),
            h=float(lam ** (1.0 / (2 * m))),
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    xi = lam_d / (lam + lam_c) ** 2
    trace_A = float(np.sum(xi))
    trace_A2 = float(np.sum(xi * xi))
    # every diagonal entry of a circulant A equals trace(A)/n
    s_sq = 2.0 * (trace_A2 - trace_A**2 / n)
    return SpectralQuantities(
        n=int(n),
        m=int(m),
        lam=float(lam),
        lam_c=lam_c,
        lam_d=lam_d,
        xi=xi,
        trace_A=trace_A,
        trace_A2=trace_A2,
        s_n=float(np.sqrt(max(s_sq, 0.0))),
        h=float(lam ** (1.0 / (2 * m))),
    )


def quadratic_form(sq: SpectralQuantities, v) -> float:
    """v^T A v in O(n log n)."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (sq.n,):
        raise DimensionError(f"expected a vector of length {sq.n}, got shape {v.shape}")
    vh = unitary_fft(v)
    return float(np.sum(sq.xi * (vh.real**2 + vh.imag**2)))
