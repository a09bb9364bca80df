"""Dense symmetric-positive-definite kernels and log-gamma special functions.

Everything downstream (posterior updates, predictive scoring, evidence)
reduces to Cholesky factorizations, triangular solves, log-determinants
and log-gamma sums, so those live here in one place. Matrices are plain
dense ``float64`` arrays kept exactly symmetric by :func:`symmetrize`;
factors are immutable :class:`CholeskyFactor` values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import gammaln

from .errors import DimensionMismatch, DomainError, NotPositiveDefinite

# Pivots are rejected relative to the largest diagonal entry, so that
# uniformly tiny but well-conditioned matrices still factor.
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor L of an SPD matrix A, with L L^T = A."""

    lower: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        object.__setattr__(self, "lower", lower)
        lower.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.lower.shape[0]


def symmetrize(a) -> np.ndarray:
    """Return (A + A^T)/2 as a new float64 array, exactly symmetric."""
    a = np.asarray(a, dtype=np.float64)
    return 0.5 * (a + a.T)


def cholesky(a) -> CholeskyFactor:
    """Factor a symmetric positive definite matrix as L L^T.

    Parameters
    ----------
    a : ndarray, shape (n, n)
        Symmetric matrix. Callers are expected to have symmetrized it
        (see :func:`symmetrize`); asymmetric input is rejected.

    Returns
    -------
    CholeskyFactor

    Raises
    ------
    NotPositiveDefinite
        If any pivot is <= ``PIVOT_RTOL`` times the largest diagonal
        entry of ``a``. This is the single signal for degenerate
        scatter matrices and invalid scale parameters everywhere in
        the package.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionMismatch("matrix must be at least 1x1")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric; apply symmetrize() first")
    n = a.shape[0]
    tol = PIVOT_RTOL * max(float(np.max(np.diag(a))), 0.0)
    lower = np.zeros((n, n))
    for j in range(n):
        pivot = a[j, j] - lower[j, :j] @ lower[j, :j]
        if not pivot > tol:
            raise NotPositiveDefinite(
                f"pivot {pivot:.3e} at index {j} is <= tolerance {tol:.3e}"
            )
        lower[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            lower[j + 1:, j] = (a[j + 1:, j] - lower[j + 1:, :j] @ lower[j, :j]) / lower[j, j]
    return CholeskyFactor(lower)


def logdet(factor: CholeskyFactor) -> float:
    """log det A for the matrix A = L L^T behind ``factor``."""
    return 2.0 * float(np.sum(np.log(np.diag(factor.lower))))


def solve(factor: CholeskyFactor, b) -> np.ndarray:
    """Solve A x = b via forward and back substitution on L."""
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (factor.dim,):
        raise DimensionMismatch(
            f"right-hand side has shape {b.shape}, factor dimension is {factor.dim}"
        )
    y = solve_triangular(factor.lower, b, lower=True)
    return solve_triangular(factor.lower, y, lower=True, trans="T")


def quadform(factor: CholeskyFactor, d) -> float:
    """Quadratic form d^T A^{-1} d, computed as ||L^{-1} d||^2 (>= 0)."""
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (factor.dim,):
        raise DimensionMismatch(
            f"vector has shape {d.shape}, factor dimension is {factor.dim}"
        )
    y = solve_triangular(factor.lower, d, lower=True)
    return float(y @ y)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return float(gammaln(x))


def log_multivariate_gamma(n: int, x: float) -> float:
    """Log of the n-variate gamma function at x.

    Computed as ``n(n-1)/4 * log(pi) + sum_i log Gamma(x + (1-i)/2)``
    for ``i = 1..n``. Requires every gamma argument to be positive,
    i.e. ``x + (1-n)/2 > 0``.
    """
    if n < 1 or int(n) != n:
        raise DomainError(f"dimension must be a positive integer, got {n}")
    n = int(n)
    x = float(x)
    if not x + (1 - n) / 2.0 > 0.0:
        raise DomainError(
            f"log_multivariate_gamma requires x > (n-1)/2, got x={x}, n={n}"
        )
    total = n * (n - 1) / 4.0 * np.log(np.pi)
    for i in range(1, n + 1):
        total += log_gamma(x + (1 - i) / 2.0)
    return float(total)
