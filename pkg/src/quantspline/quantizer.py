"""Scalar b-bit quantizers: thresholds, marks and the map y -> z.

A quantizer with thresholds t_1 < ... < t_{k-1} partitions the real line into
cells R_1 = (-inf, t_1], R_j = (t_{j-1}, t_j], R_k = (t_{k-1}, inf) and sends
every point of R_j to its mark mu_j. Ties at a threshold go to the left cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import ConfigurationError, DegenerateRangeError


@dataclass(frozen=True, eq=False)
class Quantizer:
    t: np.ndarray
    mu: np.ndarray
    scheme: str = "custom"

    def __post_init__(self):
        t = np.array(self.t, dtype=np.float64).ravel()
        mu = np.array(self.mu, dtype=np.float64).ravel()
        if t.size < 1:
            raise ConfigurationError("a quantizer needs at least one threshold")
        if np.any(np.diff(t) <= 0) or not np.all(np.isfinite(t)):
            raise ConfigurationError("thresholds must be finite and strictly increasing")
        if mu.size != t.size + 1:
            raise ConfigurationError(f"need {t.size + 1} marks for {t.size} thresholds, got {mu.size}")
        t.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "mu", mu)

    @property
    def k(self) -> int:
        return self.mu.size

    @property
    def b(self) -> int:
        """Bits needed to index the cells, ceil(log2 k)."""
        return max(1, math.ceil(math.log2(self.k)))

    def cell_index(self, y) -> np.ndarray:
        """0-based cell index of every sample."""
        return np.searchsorted(self.t, np.asarray(y, dtype=np.float64), side="left")

    def __call__(self, y) -> np.ndarray:
        return self.mu[self.cell_index(y)]

    def satisfies_condition_b(self, include_ends: bool = False) -> bool:
        """Every interior mark lies in its own cell (optionally the end marks too)."""
        idx = self.cell_index(self.mu)
        j = np.arange(self.k)
        ok = idx == j
        if not include_ends:
            ok = ok[1:-1]
        return bool(np.all(ok))

    def to_dict(self) -> dict:
        return {"b": self.b, "t": self.t.tolist(), "mu": self.mu.tolist(), "scheme": self.scheme}

    @classmethod
    def from_dict(cls, d: dict) -> "Quantizer":
        return cls(t=d["t"], mu=d["mu"], scheme=d.get("scheme", "custom"))


def apply(q: Quantizer, y) -> np.ndarray:
    return q(y)


def data_range_thresholds(y, b: int) -> np.ndarray:
    """Thresholds spanning the sample range: t_1 = min(y), t_{k-1} = max(y).

    For b = 1 there is a single threshold, placed at the midrange.
    """
    y = np.asarray(y, dtype=np.float64)
    if int(b) != b or b < 1:
        raise ConfigurationError(f"b must be a positive integer, got {b!r}")
    if y.size == 0:
        raise DegenerateRangeError("cannot build thresholds from an empty sample")
    lo, hi = float(np.min(y)), float(np.max(y))
    if not lo < hi:
        raise DegenerateRangeError("sample is constant; data-range thresholds are undefined")
    k = 2**b
    if k == 2:
        return np.array([(lo + hi) / 2.0])
    return np.linspace(lo, hi, k - 1)


def midpoint_marks(t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    mid = (t[:-1] + t[1:]) / 2.0
    return np.concatenate(([t[0]], mid, [t[-1]]))


def empirical_optimal_marks(y, t) -> np.ndarray:
    """Cell-wise sample means of ``y``; empty cells get mark 0."""
    y = np.asarray(y, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    k = t.size + 1
    idx = np.searchsorted(t, y, side="left")
    counts = np.bincount(idx, minlength=k)
    sums = np.bincount(idx, weights=y, minlength=k)
    out = np.zeros(k)
    nz = counts > 0
    out[nz] = sums[nz] / counts[nz]
    return out


def _gaussian_cell_moments(f, sigma, t):
    """P(Y in R_j) and E[Y 1(Y in R_j)] for Y ~ N(f_i, sigma^2), summed over i."""
    f = np.asarray(f, dtype=np.float64)[:, None]
    edges = np.concatenate(([-np.inf], np.asarray(t, dtype=np.float64), [np.inf]))
    a = (edges[None, :-1] - f) / sigma
    b = (edges[None, 1:] - f) / sigma
    # difference of lower-tail or upper-tail masses, whichever is more accurate
    upper = a > 0
    prob = np.where(upper, special.ndtr(-a) - special.ndtr(-b), special.ndtr(b) - special.ndtr(a))
    dens = np.exp(-0.5 * a**2) - np.exp(-0.5 * b**2)
    first = f * prob + sigma * dens / math.sqrt(2 * math.pi)
    return prob.sum(axis=0), first.sum(axis=0)


def population_optimal_marks(f_grid, sigma: float, t, density: str = "gaussian") -> np.ndarray:
    """Exact cell-conditional means of y_i ~ N(f_i, sigma^2), pooled over i."""
    if density != "gaussian":
        raise ConfigurationError(f"only Gaussian noise is supported, got {density!r}")
    if not sigma > 0:
        raise ConfigurationError("sigma must be positive")
    prob, first = _gaussian_cell_moments(f_grid, sigma, t)
    out = np.zeros(prob.size)
    ok = prob >= 1e-300
    out[ok] = first[ok] / prob[ok]
    return out


def uniform_symmetric_quantizer(c: float, l: int) -> Quantizer:
    """Thresholds (-lc, ..., -c, 0, c, ..., lc), k = 2(l + 1) cells, midpoint marks."""
    if not c > 0 or l < 0 or int(l) != l:
        raise ConfigurationError("need c > 0 and integer l >= 0")
    t = c * np.arange(-l, l + 1, dtype=np.float64)
    return Quantizer(t, midpoint_marks(t), scheme="uniform-symmetric")


def log_bit_testing_quantizer(sigma: float, n: int, m: int) -> Quantizer:
    """Quantizer with O(log n) bits sized for the test's separation rate.

    Outer thresholds at +-4 sigma sqrt(log n); interior mesh at most
    n^(-2m/(4m+1)); the cell count is rounded up to a power of two.
    """
    if not sigma > 0 or n < 2:
        raise ConfigurationError("need sigma > 0 and n >= 2")
    half = 4.0 * sigma * math.sqrt(math.log(n))
    mesh = float(n) ** (-2.0 * m / (4 * m + 1))
    gaps = math.ceil(2 * half / mesh)
    k = 2 ** max(1, math.ceil(math.log2(gaps + 2)))
    t = np.linspace(-half, half, k - 1)
    return Quantizer(t, midpoint_marks(t), scheme="log-bit-testing")


def mesh_C_k(t) -> float:
    """Largest interior cell width; 0 when there is a single threshold."""
    t = np.asarray(t, dtype=np.float64)
    if t.size < 2:
        return 0.0
    return float(np.max(np.diff(t)))


def quantize_sample(y, b: int, marks: str = "empirical") -> tuple[np.ndarray, Quantizer]:
    """Data-range thresholds with empirical-optimal or midpoint marks."""
    t = data_range_thresholds(y, b)
    if marks == "empirical":
        mu = empirical_optimal_marks(y, t)
    elif marks == "midpoint":
        mu = midpoint_marks(t)
    else:
        raise ConfigurationError(f"unknown mark rule {marks!r}")
    q = Quantizer(t, mu, scheme=f"data-range/{marks}")
    return q(y), q
