"""Special functions and small dense linear algebra used by every other module.

Incomplete-gamma machinery follows the classic stable split: a power series
for the lower tail (z < a + 1) and a Lentz continued fraction for the upper
tail. Log-space variants are provided so eigenvalue-shrinkage ratios stay
finite at large degrees of freedom, and the upper incomplete gamma extends
to nonpositive shape via the recurrence
Gamma(a, z) = (Gamma(a + 1, z) - z^a e^{-z}) / a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError

_EPS = 1.0e-16
_MAX_ITER = 600
_TINY = 1.0e-300
_EULER_GAMMA = 0.5772156649015328606

__all__ = [
    "EigenPairs",
    "regularized_gamma_q",
    "log_regularized_gamma_q",
    "inverse_regularized_gamma_q",
    "inverse_log_regularized_gamma_q",
    "upper_incomplete_gamma",
    "chi_square_quantile",
    "std_normal_cdf",
    "std_normal_quantile",
    "cholesky",
    "pair_eigen",
    "check_symmetric",
]


# ---------------------------------------------------------------------------
# incomplete gamma core
# ---------------------------------------------------------------------------

def _gamma_p_series(a: float, z: float) -> float:
    """Lower regularized P(a, z) by power series; use when z < a + 1."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-z + a * math.log(z) - math.lgamma(a))
    raise RuntimeError(f"gamma series failed to converge at a={a}, z={z}")


def _log_gamma_q_cf(a: float, z: float) -> float:
    """log Q(a, z) by modified Lentz continued fraction; use when z >= a + 1."""
    b = z + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return -z + a * math.log(z) - math.lgamma(a) + math.log(h)
    raise RuntimeError(f"gamma continued fraction failed at a={a}, z={z}")


def regularized_gamma_q(a: float, z: float) -> float:
    """Upper regularized incomplete gamma Q(a, z) = Gamma(a, z) / Gamma(a).

    Requires a > 0 and z >= 0; Q(a, 0) = 1 by definition.
    """
    if a <= 0.0:
        raise ValueError(f"shape must be positive, got a={a}")
    if z < 0.0:
        raise ValueError(f"argument must be nonnegative, got z={z}")
    if z == 0.0:
        return 1.0
    if z < a + 1.0:
        return 1.0 - _gamma_p_series(a, z)
    return math.exp(_log_gamma_q_cf(a, z))


def log_regularized_gamma_q(a: float, z: float) -> float:
    """log Q(a, z), finite far into the upper tail where Q underflows."""
    if a <= 0.0:
        raise ValueError(f"shape must be positive, got a={a}")
    if z < 0.0:
        raise ValueError(f"argument must be nonnegative, got z={z}")
    if z == 0.0:
        return 0.0
    if z < a + 1.0:
        return math.log1p(-_gamma_p_series(a, z))
    return _log_gamma_q_cf(a, z)


def inverse_log_regularized_gamma_q(a: float, log_p: float) -> float:
    """Solve log Q(a, z) = log_p for z, for log_p <= 0.

    Safeguarded Newton iteration on g(z) = log Q(a, z) - log_p; the bracket
    is grown geometrically before refinement. Works arbitrarily deep in the
    tail because everything stays in log space.
    """
    if log_p > 0.0:
        raise ValueError(f"log probability must be <= 0, got {log_p}")
    if log_p == 0.0:
        return 0.0

    # bracket: Q decreasing in z, so g decreasing
    lo, hi = 0.0, max(2.0 * a, 2.0)
    while log_regularized_gamma_q(a, hi) > log_p:
        lo = hi
        hi *= 2.0
        if hi > 1.0e308:
            raise RuntimeError("inverse gamma bracket overflow")

    z = 0.5 * (lo + hi)
    for _ in range(200):
        g = log_regularized_gamma_q(a, z) - log_p
        if g > 0.0:
            lo = z
        else:
            hi = z
        # d/dz log Q = -pdf / Q
        log_pdf = (a - 1.0) * math.log(z) - z - math.lgamma(a)
        deriv = -math.exp(log_pdf - log_regularized_gamma_q(a, z))
        step = g / deriv if deriv != 0.0 else 0.0
        z_new = z - step
        if not (lo < z_new < hi):
            z_new = 0.5 * (lo + hi)
        if abs(z_new - z) <= 1.0e-15 * (1.0 + abs(z_new)):
            return z_new
        z = z_new
    return z


def inverse_regularized_gamma_q(a: float, p: float) -> float:
    """z such that regularized_gamma_q(a, z) = p, for p in (0, 1]."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"probability must lie in (0, 1], got p={p}")
    if p == 1.0:
        return 0.0
    return inverse_log_regularized_gamma_q(a, math.log(p))


# ---------------------------------------------------------------------------
# upper incomplete gamma for general shape
# ---------------------------------------------------------------------------

def _exp1(z: float) -> float:
    """Exponential integral E1(z) = Gamma(0, z) for z > 0."""
    if z <= 1.0:
        # alternating series around the log singularity
        total = -_EULER_GAMMA - math.log(z)
        term = 1.0
        for k in range(1, _MAX_ITER):
            term *= -z / k
            contrib = -term / k
            total += contrib
            if abs(contrib) < abs(total) * _EPS + 1.0e-300:
                return total
        raise RuntimeError(f"E1 series failed at z={z}")
    # Lentz continued fraction: E1(z) = e^-z / (z + 1/(1 + 1/(z + 2/(1 + ...))))
    b = z + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * i
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * math.exp(-z)
    raise RuntimeError(f"E1 continued fraction failed at z={z}")


def log_upper_incomplete_gamma(a: float, z: float) -> float:
    """log Gamma(a, z) for a > 0, z > 0."""
    if a <= 0.0:
        raise ValueError(f"log form requires a > 0, got a={a}")
    if z <= 0.0:
        raise ValueError(f"argument must be positive, got z={z}")
    return math.lgamma(a) + log_regularized_gamma_q(a, z)


def upper_incomplete_gamma(a: float, z: float) -> float:
    """Gamma(a, z) = integral_z^inf t^(a-1) e^-t dt, any real a, z > 0."""
    if z <= 0.0:
        raise ValueError(f"argument must be positive, got z={z}")
    if a > 0.0:
        return math.exp(log_upper_incomplete_gamma(a, z))
    # nonpositive shape: climb down from a positive (or E1) seed
    if a == math.floor(a):
        steps = int(round(-a))
        s = 0.0
        value = _exp1(z)
    else:
        steps = int(math.ceil(-a))
        s = a + steps
        value = math.exp(log_upper_incomplete_gamma(s, z))
    for _ in range(steps):
        s -= 1.0
        value = (value - math.exp(s * math.log(z) - z)) / s
    return value


# ---------------------------------------------------------------------------
# distribution helpers
# ---------------------------------------------------------------------------

def chi_square_quantile(df: int, p: float) -> float:
    """p-th quantile of the chi-square distribution with df >= 1."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got p={p}")
    return 2.0 * inverse_regularized_gamma_q(0.5 * df, 1.0 - p)


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def std_normal_quantile(p: float) -> float:
    """Inverse of std_normal_cdf on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got p={p}")
    if p == 0.5:
        return 0.0
    tail = min(p, 1.0 - p)
    # 2 * (1 - Phi(x)) = Q(1/2, x^2 / 2) for x >= 0
    x = math.sqrt(2.0 * inverse_regularized_gamma_q(0.5, 2.0 * tail))
    # one Newton polish step against the CDF itself
    target = 1.0 - tail
    pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    if pdf > 0.0:
        x -= (std_normal_cdf(x) - target) / pdf
    return x if p >= 0.5 else -x


# ---------------------------------------------------------------------------
# small dense linear algebra
# ---------------------------------------------------------------------------

def check_symmetric(m: np.ndarray, rel_tol: float = 1.0e-12) -> None:
    """Raise ValueError unless m is square and symmetric to rel_tol."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))))
    if float(np.max(np.abs(m - m.T))) > rel_tol * scale:
        raise ValueError("matrix is not symmetric")


def cholesky(m: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^T = m; m must be symmetric positive definite."""
    m = np.asarray(m, dtype=float)
    check_symmetric(m)
    k = m.shape[0]
    lower = np.zeros_like(m)
    for j in range(k):
        pivot = m[j, j] - lower[j, :j] @ lower[j, :j]
        if pivot <= 0.0:
            raise NotPositiveDefiniteError(
                f"pivot {pivot:.3e} at column {j}: matrix is not positive definite"
            )
        lower[j, j] = math.sqrt(pivot)
        if j + 1 < k:
            lower[j + 1:, j] = (m[j + 1:, j] - lower[j + 1:, :j] @ lower[j, :j]) / lower[j, j]
    return lower


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues in descending order with unit-norm eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def pair_eigen(w: np.ndarray, b: np.ndarray) -> EigenPairs:
    """Eigen-pairs of w^-1 b for w positive definite, b positive semidefinite.

    Solved as the generalized symmetric problem b u = lambda w u through
    Cholesky reduction, so the eigenvalues come out real and nonnegative
    (tiny negative rounding is clipped to zero).
    """
    w = np.asarray(w, dtype=float)
    b = np.asarray(b, dtype=float)
    if w.shape != b.shape:
        raise ValueError(f"shape mismatch: {w.shape} vs {b.shape}")
    lower = cholesky(w)
    inner = np.linalg.solve(lower, np.linalg.solve(lower, b.T).T)
    inner = 0.5 * (inner + inner.T)
    vals, vecs = np.linalg.eigh(inner)
    order = np.argsort(vals, kind="stable")[::-1]
    vals = np.maximum(vals[order], 0.0)
    u = np.linalg.solve(lower.T, vecs[:, order])
    u /= np.linalg.norm(u, axis=0)
    return EigenPairs(values=vals, vectors=u)
