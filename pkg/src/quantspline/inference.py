"""Quantization test of H0: f = f_* and its diagnostics.

The statistic is n T = w^T A w with w = z - f_*(i/n) (equal to
n ||f_hat_bb - f_*||^2 when f_* = 0). Under H0 it is standardized as

    (n T - trace(A) tau^2) / (s_n tau^2)

with tau^2 estimated by the empirical variance of the quantized sample z, and
H0 is rejected when the absolute standardized value reaches the two-sided
Gaussian critical value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .exceptions import ConfigurationError, DegenerateVarianceError, DimensionError, InvalidPenaltyError
from .quantizer import Quantizer, _gaussian_cell_moments, mesh_C_k
from .spectral import SpectralQuantities, build_spectral, quadratic_form


@dataclass(frozen=True)
class TestResult:
    n_T: float
    tau_sq_hat: float
    standardized: float
    p_value: float
    reject: bool
    alpha: float
    lam: float
    trace_A: float
    s_n: float
    null: str = "zero"
    quantizer: dict | None = None
    extras: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict:
        out = {
            "n_T": self.n_T,
            "tau_sq_hat": self.tau_sq_hat,
            "standardized": self.standardized,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "lambda": self.lam,
            "trace_A": self.trace_A,
            "s_n": self.s_n,
            "null": self.null,
        }
        if self.quantizer is not None:
            out["quantizer"] = self.quantizer
        out.update(self.extras)
        return out


# residual variance below this fraction of mean(z^2) counts as an exact fit
_EXACT_FIT_RTOL = 1e-24


def critical_value(alpha: float) -> float:
    return float(special.ndtri(1.0 - alpha / 2.0))


def quantization_test(
    z,
    f_star_grid=None,
    m: int = 2,
    lam: float = 1e-4,
    alpha: float = 0.1,
    quantizer: Quantizer | None = None,
    null: str = "zero",
    projection=None,
) -> TestResult:
    """Run the test on quantized responses ``z`` against null grid values ``f_star_grid``.

    ``projection`` is an (n, p) orthonormal basis of directions fitted out of
    z under the null (e.g. the least-squares line); when given, the null mean
    and scale use (I - P) A (I - P) in place of A.
    """
    z = np.asarray(z, dtype=np.float64)
    if not 0 < alpha < 1:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not lam > 0:
        raise InvalidPenaltyError(f"penalty must be positive, got {lam!r}")
    n = z.size
    if f_star_grid is None:
        w = z
    else:
        f_star = np.asarray(f_star_grid, dtype=np.float64)
        if f_star.shape != z.shape:
            raise DimensionError("f_star_grid must match z in length")
        w = z - f_star
    if np.all(z == z[0]):
        raise DegenerateVarianceError("all quantized values are identical; tau^2 estimate is zero")
    # variance about the null mean; identical to the plain variance of z when f_* = 0
    tau_sq = float(np.mean(w * w) - np.mean(w) ** 2)
    if not tau_sq > 0 and f_star_grid is None:
        raise DegenerateVarianceError("empirical variance of z is not positive")
    sq = build_spectral(n, m, lam)
    if tau_sq <= _EXACT_FIT_RTOL * float(np.mean(z * z)):
        # residuals are rounding noise: the data sit exactly on the null
        return TestResult(
            n_T=0.0,
            tau_sq_hat=0.0,
            standardized=0.0,
            p_value=1.0,
            reject=False,
            alpha=float(alpha),
            lam=float(lam),
            trace_A=sq.trace_A,
            s_n=sq.s_n,
            null=null,
            quantizer=None if quantizer is None else quantizer.to_dict(),
            extras={"exact_fit": True},
        )
    nT = quadratic_form(sq, w)
    if projection is None:
        trace, scale = sq.trace_A, sq.s_n
    else:
        trace, scale = projected_moments(sq, projection)
    standardized = (nT - trace * tau_sq) / (scale * tau_sq)
    p_value = float(2.0 * special.ndtr(-abs(standardized)))
    return TestResult(
        n_T=nT,
        tau_sq_hat=tau_sq,
        standardized=float(standardized),
        p_value=min(1.0, p_value),
        reject=bool(abs(standardized) >= critical_value(alpha)),
        alpha=float(alpha),
        lam=float(lam),
        trace_A=trace,
        s_n=scale,
        null=null,
        quantizer=None if quantizer is None else quantizer.to_dict(),
    )


def apply_A(sq: SpectralQuantities, v) -> np.ndarray:
    """A v for one vector or for every column of a 2-d array."""
    v = np.asarray(v, dtype=np.float64)
    xi = sq.xi if v.ndim == 1 else sq.xi[:, None]
    return np.fft.ifft(xi * np.fft.fft(v, axis=0), axis=0).real


def projected_moments(sq: SpectralQuantities, basis) -> tuple[float, float]:
    """trace(B) and sqrt(2 sum_{i != j} B_ij^2) for B = (I - P) A (I - P).

    P = U U^T with U the (n, p) orthonormal ``basis``; everything is O(p n log n).
    """
    U = np.asarray(basis, dtype=np.float64)
    n = sq.n
    AU = apply_A(sq, U)
    UAU = U.T @ AU
    A2U = apply_A(sq, AU)
    trace_b = sq.trace_A - float(np.trace(UAU))
    # ||B||_F^2 = tr(A^2) - 2 tr(P A^2) + tr(P A P A)
    frob = sq.trace_A2 - 2.0 * float(np.trace(U.T @ A2U)) + float(np.sum(UAU * UAU))
    diag = sq.trace_A / n - 2.0 * np.sum(U * AU, axis=1) + np.einsum("ip,pq,iq->i", U, UAU, U)
    s_sq = 2.0 * (frob - float(np.sum(diag * diag)))
    return trace_b, float(np.sqrt(max(s_sq, 0.0)))


def linear_basis(n: int) -> np.ndarray:
    """Orthonormal basis of span{1, x} on the design x_i = i/n."""
    x = np.arange(1, n + 1) / n
    q, _ = np.linalg.qr(np.column_stack([np.ones(n), x]))
    return q


def linear_fit_grid(z) -> np.ndarray:
    """Least-squares line in x_i = i/n, evaluated on the design."""
    z = np.asarray(z, dtype=np.float64)
    n = z.size
    if n < 3:
        raise DimensionError("linearity test needs n >= 3")
    x = np.arange(1, n + 1) / n
    slope, intercept = np.polyfit(x, z, 1)
    return slope * x + intercept


def linearity_test(z, m: int = 2, lam: float = 1e-4, alpha: float = 0.1, quantizer: Quantizer | None = None) -> TestResult:
    """Test H0: f is linear by centering at the least-squares line.

    The null mean and scale account for the two fitted directions.
    """
    z = np.asarray(z, dtype=np.float64)
    return quantization_test(
        z,
        linear_fit_grid(z),
        m=m,
        lam=lam,
        alpha=alpha,
        quantizer=quantizer,
        null="linear",
        projection=linear_basis(z.size),
    )


def _second_moment_below(f, sigma, c):
    """E[Y^2 1(Y <= c)] for Y ~ N(f, sigma^2)."""
    u = (c - f) / sigma
    cdf = special.ndtr(u)
    pdf = np.exp(-0.5 * u * u) / math.sqrt(2 * math.pi)
    return f * f * cdf - 2 * f * sigma * pdf + sigma**2 * (cdf - u * pdf)


def _second_moment_above(f, sigma, c):
    u = (c - f) / sigma
    sf = special.ndtr(-u)
    pdf = np.exp(-0.5 * u * u) / math.sqrt(2 * math.pi)
    return f * f * sf + 2 * f * sigma * pdf + sigma**2 * (sf + u * pdf)


def quantization_error_terms(f0_grid, sigma: float, t, m: int = 2) -> dict:
    """Mesh and tail terms bounding the extra MSE caused by quantization.

    C_k_sq is the squared interior mesh; G1 and G2 are the second moments of
    the design-averaged noisy response below the first and above the last
    threshold. ``m`` is accepted for interface symmetry and does not enter.
    """
    if not sigma > 0:
        raise ConfigurationError("sigma must be positive")
    f0 = np.asarray(f0_grid, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    c_sq = mesh_C_k(t) ** 2
    g1 = float(np.mean(_second_moment_below(f0, sigma, t[0])))
    g2 = float(np.mean(_second_moment_above(f0, sigma, t[-1])))
    return {"C_k_sq": c_sq, "G1": g1, "G2": g2, "G_total": c_sq + g1 + g2}


def separation_rate(sq: SpectralQuantities, tau_sq: float, t) -> float:
    """Smallest empirical-norm signal the test detects with high power."""
    n = sq.n
    return math.sqrt(sq.s_n * tau_sq / n + sq.lam + float(n) ** (-2 * sq.m) + mesh_C_k(t) ** 2)


def null_mean_residual(q: Quantizer, sigma: float) -> float:
    """E z under pure noise: sum_j mu_j P(sigma * eps in R_j)."""
    prob, _ = _gaussian_cell_moments(np.zeros(1), sigma, q.t)
    return float(np.dot(q.mu, prob))


def null_variance(q: Quantizer, sigma: float) -> float:
    """Var z under pure Gaussian noise (population tau_k^2)."""
    prob, _ = _gaussian_cell_moments(np.zeros(1), sigma, q.t)
    mean = float(np.dot(q.mu, prob))
    return float(np.dot(q.mu**2, prob) - mean**2)


def check_conditions(q: Quantizer, sigma: float, n: int, lam: float, m: int = 2, tol: float = 1e-10) -> dict:
    """Diagnostic report for the quantizer conditions used by the theory."""
    if not sigma > 0:
        raise ConfigurationError("sigma must be positive")
    resid = null_mean_residual(q, sigma)
    r2_threshold = 8.0 * sigma**2 * math.log(n)
    tail_sq = float(min(q.t[0] ** 2, q.t[-1] ** 2))
    return {
        "condition_B": q.satisfies_condition_b(),
        "condition_C": abs(resid) <= tol,
        "condition_C_residual": resid,
        "condition_R2_tails": tail_sq > r2_threshold,
        "R2_tail_threshold": r2_threshold,
        "min_tail_sq": tail_sq,
        "n_h_sq": float(n * lam ** (1.0 / m)),
        "tails_exceed_sigma": tail_sq > sigma**2,
        "mesh_C_k": mesh_C_k(q.t),
        "tau_sq_null": null_variance(q, sigma),
    }
