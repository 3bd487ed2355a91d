"""Periodic smoothing-spline fits on the design i/n, i = 1..n.

The same solver serves raw responses y and quantized responses z:

    theta = (Sigma + lam I)^-1 v / n,     f_hat = sum_i theta_i K(i/n, .)

All solves, GCV scores and L2 norms are done in the Fourier eigenbasis
(see :mod:`quantspline.spectral` for the transform convention).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _backend
from .exceptions import ConfigurationError, DimensionError, InvalidPenaltyError, TooFewPointsError
from .kernel import KernelSpec
from .spectral import eigenvalues, unitary_fft

GCV_MIN_LAMBDA = 1e-8


def default_lambda_grid(num: int = 40, lo: float = 1e-8, hi: float = 1e2) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), num)


@dataclass(frozen=True, eq=False)
class FitResult:
    theta: np.ndarray
    fitted_grid: np.ndarray
    lam: float
    n: int
    m: int
    source: str = "raw"
    values: np.ndarray | None = None

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "lambda": self.lam,
            "source": self.source,
            "theta": self.theta.tolist(),
        }


def _check_inputs(values, lam):
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError("values must be a 1-d sequence")
    if v.size < 4:
        raise TooFewPointsError(f"need at least 4 design points, got {v.size}")
    if not lam > 0:
        raise InvalidPenaltyError(f"penalty must be positive, got {lam!r}")
    return v


def fit(values, m: int = 2, lam: float = 1e-4, source: str = "raw") -> FitResult:
    v = _check_inputs(values, lam)
    n = v.size
    lam_c, _ = eigenvalues(n, m)
    vh = np.fft.fft(v)
    theta = np.ascontiguousarray(np.fft.ifft(vh / (n * (lam + lam_c))).real)
    fitted = np.ascontiguousarray(np.fft.ifft(vh * (lam_c / (lam + lam_c))).real)
    return FitResult(theta=theta, fitted_grid=fitted, lam=float(lam), n=n, m=int(m), source=source, values=v)


def evaluate(fit_: FitResult, x) -> np.ndarray:
    """f_hat(x) = sum_i theta_i K(i/n, x); periodic in x."""
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64).ravel())
    return _backend.kernel_sum(np.ascontiguousarray(fit_.theta), KernelSpec(fit_.m).coeffs_K, x)


def gcv_scores(values, m: int, grid) -> np.ndarray:
    """GCV score n ||(I - S) v||^2 / (n - tr S)^2 for each candidate penalty."""
    v = np.asarray(values, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64).ravel()
    if grid.size == 0:
        raise ConfigurationError("lambda grid is empty")
    if np.any(grid <= 0):
        raise InvalidPenaltyError("lambda grid must be positive")
    n = v.size
    lam_c, _ = eigenvalues(n, m)
    power = np.abs(unitary_fft(v)) ** 2
    shrink = grid[:, None] / (grid[:, None] + lam_c[None, :])
    resid = np.sum(shrink**2 * power[None, :], axis=1)
    trace_s = np.sum(1.0 - shrink, axis=1)
    return n * resid / (n - trace_s) ** 2


def gcv_select(values, m: int = 2, grid=None):
    """Minimize the GCV score over ``grid``; ties go to the larger penalty.

    Returns ``(lambda_hat, scores)``.
    """
    grid = default_lambda_grid() if grid is None else np.asarray(grid, dtype=np.float64).ravel()
    if grid.size and np.min(grid) < GCV_MIN_LAMBDA:
        warnings.warn(
            f"lambda grid goes below {GCV_MIN_LAMBDA:g}; GCV is unstable near interpolation",
            RuntimeWarning,
            stacklevel=2,
        )
    scores = gcv_scores(values, m, grid)
    best = np.flatnonzero(scores == np.min(scores))
    return float(np.max(grid[best])), scores


def gcv_log_scaled(values, m: int = 2, grid=None) -> float:
    """GCV penalty divided by log n (undersmoothing for testing)."""
    n = np.asarray(values).size
    if n < 3:
        raise TooFewPointsError("need n >= 3")
    lam, _ = gcv_select(values, m, grid)
    return lam / math.log(n)


def _theta(target, like: FitResult) -> np.ndarray:
    if target is None:
        return np.zeros(like.n)
    if isinstance(target, FitResult):
        if (target.n, target.m) != (like.n, like.m):
            raise DimensionError("fits must share n and m")
        return target.theta
    arr = np.asarray(target, dtype=np.float64)
    if arr.shape != (like.n,):
        raise DimensionError(f"target must have length {like.n}")
    # grid values are smoothed with the same penalty (centered form)
    return fit(arr, like.m, like.lam).theta


def l2_distance_sq(fit_: FitResult, target=None) -> float:
    """||f_hat - g||^2 over [0, 1], exact via Parseval.

    ``target`` is None (g = 0), another FitResult, or grid values g(i/n); grid
    values are passed through the same smoother, which makes the result equal
    to (v - g)^T A (v - g) / n.
    """
    d = fit_.theta - _theta(target, fit_)
    _, lam_d = eigenvalues(fit_.n, fit_.m)
    dh = np.fft.fft(d)
    return float(np.sum(lam_d * (dh.real**2 + dh.imag**2)))


def inner_product_sine(fit_: FitResult, freq: int) -> float:
    """<f_hat, sin(2 pi freq x)> in L2[0, 1]."""
    grid = np.arange(1, fit_.n + 1) / fit_.n
    return float(np.dot(fit_.theta, np.sin(2 * np.pi * freq * grid)) / (2 * np.pi * freq) ** (2 * fit_.m))


def sine_l2_error_sq(fit_: FitResult, amplitude: float, freq: int) -> float:
    """Exact ||f_hat - amplitude sin(2 pi freq x)||^2."""
    return l2_distance_sq(fit_) - 2 * amplitude * inner_product_sine(fit_, freq) + amplitude**2 / 2


def empirical_norm_sq(values) -> float:
    v = np.asarray(values, dtype=np.float64)
    return float(np.mean(v * v))


def quantization_gap_bound(fit_bb: FitResult, fit_ss: FitResult, y, z):
    """(||f_bb - f_ss||^2, mean((z - y)^2)); the first never exceeds the second."""
    if (fit_bb.n, fit_bb.m, fit_bb.lam) != (fit_ss.n, fit_ss.m, fit_ss.lam):
        raise DimensionError("fits must share n, m and lambda")
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    return l2_distance_sq(fit_bb, fit_ss), float(np.mean((z - y) ** 2))
