"""Conjugate inference for the shared-covariance Gaussian class model.

The generative model is ``x | k ~ Normal(mu_k, Lambda^{-1})`` with one
within-class precision ``Lambda`` shared by all K classes. The prior
couples the mean matrix ``M = [mu_1 .. mu_K]`` and ``Lambda``: given
``Lambda``, each ``mu_k`` is ``Normal(0, (1/r) Lambda^{-1})`` (a matrix
normal with diagonal column precision ``r I`` and zero location), and
``Lambda`` is Wishart with degrees of freedom ``a`` and scale matrix
``B`` (density proportional to ``|Lambda|^{(a-N-1)/2} exp(-tr(B
Lambda)/2)``, mean ``a B^{-1}``).

That prior is conjugate: the posterior has the same matrix-normal-Wishart
form with parameters

    R*      = r I + diag(T_1 .. T_K)
    M*      = F (R*)^{-1}              (column k: f_k / (r + T_k))
    a*      = a + T
    B*      = B + S - F (R*)^{-1} F^T

in terms of the sufficient statistics (T_k, F, S). The non-informative
limit is the literal input ``a = 0, B = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .dataset import SufficientStats
from .errors import NotPositiveDefinite, ShapeMismatch


@dataclass(frozen=True)
class PriorHyper:
    """Prior hyperparameters (r, a, B).

    ``r`` is the shrinkage precision pulling class means toward the
    origin; larger r shrinks harder and is what makes classes with no
    training data scorable. ``b=None`` stands for the zero matrix.
    ``proper`` records whether (a, B) define a normalizable prior
    (``a > N - 1`` and B positive definite); only proper priors have a
    finite evidence constant.
    """

    r: float
    a: float = 0.0
    b: np.ndarray | None = None
    proper: bool = field(init=False)

    def __post_init__(self):
        r = float(self.r)
        a = float(self.a)
        if not r > 0.0:
            raise ValueError(f"shrinkage precision r must be positive, got {r}")
        if not a >= 0.0:
            raise ValueError(f"degrees of freedom a must be non-negative, got {a}")
        proper = False
        b = self.b
        if b is not None:
            b = linalg.symmetrize(b)
            b.flags.writeable = False
            if a > b.shape[0] - 1:
                try:
                    linalg.cholesky(b)
                    proper = True
                except NotPositiveDefinite:
                    proper = False
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "proper", proper)

    @classmethod
    def noninformative(cls, r: float) -> "PriorHyper":
        """The a = 0, B = 0 prior; only r remains to be chosen."""
        return cls(r=r, a=0.0, b=None)


@dataclass(frozen=True)
class PosteriorMNW:
    """Matrix-normal-Wishart posterior parameters.

    ``m_star`` is N x K (column k is the posterior mean of mu_k),
    ``r_star_diag`` holds the K diagonal entries r + T_k, ``a_star``
    is a + T, and ``b_star`` is the posterior scale matrix. ``source_r``
    keeps the r that produced this posterior so empty classes can be
    appended later.

    B* positive definiteness is deliberately not checked here; the
    object is a valid container even when there is too little data to
    score, and consumers check at model build time.
    """

    m_star: np.ndarray
    r_star_diag: np.ndarray
    a_star: float
    b_star: np.ndarray
    source_r: float

    def __post_init__(self):
        m = np.asarray(self.m_star, dtype=np.float64)
        rd = np.asarray(self.r_star_diag, dtype=np.float64)
        b = np.asarray(self.b_star, dtype=np.float64)
        if m.ndim != 2 or rd.ndim != 1 or m.shape[1] != rd.shape[0]:
            raise ShapeMismatch("mean matrix and diagonal precision disagree in K")
        if b.shape != (m.shape[0], m.shape[0]):
            raise ShapeMismatch("scale matrix shape does not match dimension")
        if np.any(rd <= 0.0):
            raise ValueError("posterior column precisions must be positive")
        for arr in (m, rd, b):
            arr.flags.writeable = False
        object.__setattr__(self, "m_star", m)
        object.__setattr__(self, "r_star_diag", rd)
        object.__setattr__(self, "b_star", b)
        object.__setattr__(self, "a_star", float(self.a_star))
        object.__setattr__(self, "source_r", float(self.source_r))

    @property
    def dim(self) -> int:
        return self.m_star.shape[0]

    @property
    def n_classes(self) -> int:
        return self.m_star.shape[1]


def _resolve_b(b: np.ndarray | None, dim: int) -> np.ndarray:
    if b is None:
        return np.zeros((dim, dim))
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (dim, dim):
        raise ShapeMismatch(
            f"prior scale matrix has shape {b.shape}, data dimension is {dim}"
        )
    return b


def _posterior_general(stats: SufficientStats, theta, r_diag, a: float, b):
    """Conjugate update for a general diagonal-precision, located prior.

    Supports a nonzero location ``theta`` and per-class precisions
    ``r_diag`` so that a posterior can be re-used as the prior for more
    data (the public API only ever passes theta = 0 and r_diag = r * 1).
    Update:

        R*  = r_diag + counts
        G   = theta diag(r_diag) + F
        M*  = G (R*)^{-1}
        a*  = a + T
        B*  = B + S + theta diag(r_diag) theta^T - G (R*)^{-1} G^T
    """
    counts = stats.counts.astype(np.float64)
    r_diag = np.asarray(r_diag, dtype=np.float64)
    b = _resolve_b(b, stats.dim)
    if r_diag.shape != (stats.n_classes,):
        raise ShapeMismatch("per-class precision vector does not match K")
    r_star = r_diag + counts
    if theta is None:
        g = stats.f
        theta_term = 0.0
    else:
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != stats.f.shape:
            raise ShapeMismatch("prior location shape does not match (N, K)")
        g = theta * r_diag[None, :] + stats.f
        theta_term = (theta * r_diag[None, :]) @ theta.T
    m_star = g / r_star[None, :]
    a_star = a + stats.total
    # Subtraction can break exact symmetry in floating point; restore it.
    b_star = linalg.symmetrize(b + stats.scatter + theta_term - (g / r_star[None, :]) @ g.T)
    return m_star, r_star, a_star, b_star


def posterior(stats: SufficientStats, prior: PriorHyper) -> PosteriorMNW:
    """Closed-form posterior from sufficient statistics and a prior."""
    r_diag = np.full(stats.n_classes, prior.r)
    m_star, r_star, a_star, b_star = _posterior_general(
        stats, None, r_diag, prior.a, prior.b
    )
    return PosteriorMNW(m_star, r_star, a_star, b_star, source_r=prior.r)


def add_empty_class(post: PosteriorMNW) -> PosteriorMNW:
    """Append a class with no training data.

    The new column has zero mean and precision equal to the source r;
    ``a_star`` and ``b_star`` are untouched (the same array is shared,
    which is safe because posteriors are immutable).
    """
    m_star = np.hstack([post.m_star, np.zeros((post.dim, 1))])
    r_star_diag = np.append(post.r_star_diag, post.source_r)
    return PosteriorMNW(m_star, r_star_diag, post.a_star, post.b_star,
                        source_r=post.source_r)


def column_marginal(post: PosteriorMNW, k: int):
    """Posterior marginal of mean column k: returns (mu_star_k, c_star_k).

    ``c_star_k = 1/(r + T_k)`` is the k-th diagonal entry of (R*)^{-1};
    given Lambda, mu_k is Normal(mu_star_k, c_star_k Lambda^{-1}).
    """
    if not 0 <= k < post.n_classes:
        raise IndexError(f"class index {k} out of range for K={post.n_classes}")
    return post.m_star[:, k].copy(), float(1.0 / post.r_star_diag[k])
