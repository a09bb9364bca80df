"""Predictive scoring: multivariate-T densities, class posteriors, decisions.

Integrating the Gaussian likelihood over the matrix-normal-Wishart
posterior gives each class a multivariate-T predictive density

    p(x | k) = T(x | mu*_k, (c*_k + 1) B*, a*)

whose log form, with beta = 1/(c*_k + 1), d = x - mu*_k and
q = d^T (B*)^{-1} d, is

    log Gamma((a*+1)/2) - log Gamma((a*+1-N)/2)
      - (N/2) log(pi (c*_k+1)) - (1/2) log det B*
      - ((a*+1)/2) log(1 + beta q).

Everything is computed in the log domain end to end; the exponent
(a*+1)/2 overflows linear-domain arithmetic already at modest training
set sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    AllZeroPrior,
    DegenerateScatter,
    DimensionMismatch,
    InsufficientDof,
    NotPositiveDefinite,
    ShapeMismatch,
)
from .inference import PosteriorMNW
from .linalg import CholeskyFactor


@dataclass(frozen=True)
class PredictiveModel:
    """Frozen per-class scoring parameters.

    Holds the per-class location ``mu_star`` (N x K), the per-class
    scale inflation ``c_star`` (c*_k = 1/(r + T_k)), the shared degrees
    of freedom ``a_star``, the shared scale matrix ``b_star`` with its
    Cholesky factor and log-determinant, and the precomputed per-class
    log normalization constants.
    """

    class_names: tuple
    mu_star: np.ndarray
    c_star: np.ndarray
    a_star: float
    b_star: np.ndarray
    chol_b_star: CholeskyFactor
    logdet_b_star: float
    log_norm: np.ndarray

    def __post_init__(self):
        for name in ("mu_star", "c_star", "b_star", "log_norm"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def dim(self) -> int:
        return self.mu_star.shape[0]

    @property
    def n_classes(self) -> int:
        return self.mu_star.shape[1]


def _assemble_model(class_names, mu_star, c_star, a_star, b_star) -> PredictiveModel:
    """Shared constructor for freshly built and deserialized models."""
    mu_star = np.asarray(mu_star, dtype=np.float64)
    c_star = np.asarray(c_star, dtype=np.float64)
    b_star = np.asarray(b_star, dtype=np.float64)
    n = mu_star.shape[0]
    if np.any(c_star <= 0.0):
        raise ValueError("per-class c* values must be positive")
    # Degeneracy of B* is the more informative failure, so check it first;
    # with too little data both conditions tend to trip together.
    try:
        chol = linalg.cholesky(b_star)
    except NotPositiveDefinite as exc:
        raise DegenerateScatter(
            "posterior scale matrix B* is not positive definite; "
            "typically there are too few training patterns for the "
            "feature dimension under a non-informative prior"
        ) from exc
    if not a_star + 1.0 - n > 0.0:
        raise InsufficientDof(
            f"predictive needs a* + 1 - N > 0, got a*={a_star}, N={n}"
        )
    ld = linalg.logdet(chol)
    log_norm = (linalg.log_gamma((a_star + 1.0) / 2.0)
                - linalg.log_gamma((a_star + 1.0 - n) / 2.0)
                - 0.5 * n * np.log(np.pi * (c_star + 1.0))
                - 0.5 * ld)
    if class_names is None:
        class_names = tuple(f"class_{k}" for k in range(mu_star.shape[1]))
    if len(class_names) != mu_star.shape[1]:
        raise ShapeMismatch("number of class names does not match K")
    return PredictiveModel(tuple(class_names), mu_star, c_star, float(a_star),
                           b_star, chol, ld, log_norm)


def build_model(post: PosteriorMNW, class_names=None) -> PredictiveModel:
    """Turn a posterior into a scorer.

    Raises
    ------
    InsufficientDof
        If ``a* + 1 - N <= 0`` (the normalizing gamma argument would be
        non-positive).
    DegenerateScatter
        If B* fails the Cholesky positive-definiteness check.
    """
    c_star = 1.0 / post.r_star_diag
    return _assemble_model(class_names, post.m_star, c_star, post.a_star,
                           post.b_star)


def _log_tail(t: float, half_exponent: float) -> float:
    # log1p near the mode per the numerics contract; plain log elsewhere.
    if t < 0.5:
        body = np.log1p(t)
    else:
        body = np.log(1.0 + t)
    return -half_exponent * float(body)


def log_predictive(model: PredictiveModel, x, k: int) -> float:
    """Normalized log predictive density of pattern x under class k."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise DimensionMismatch(
            f"pattern has shape {x.shape}, model dimension is {model.dim}"
        )
    if not 0 <= k < model.n_classes:
        raise IndexError(f"class index {k} out of range for K={model.n_classes}")
    q = linalg.quadform(model.chol_b_star, x - model.mu_star[:, k])
    beta = 1.0 / (model.c_star[k] + 1.0)
    return float(model.log_norm[k]) + _log_tail(beta * q, 0.5 * (model.a_star + 1.0))


def log_predictive_unnormalized(model: PredictiveModel, x, k: int) -> float:
    """Log predictive up to an additive constant shared by all classes.

    Only the class-dependent factors are kept:

        -(N/2) log(c*_k + 1) - ((a*+1)/2) log(1 + q / (c*_k + 1))

    For class posteriors this is all that matters, and it stays finite
    even when the shared normalizer is expensive or irrelevant.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise DimensionMismatch(
            f"pattern has shape {x.shape}, model dimension is {model.dim}"
        )
    if not 0 <= k < model.n_classes:
        raise IndexError(f"class index {k} out of range for K={model.n_classes}")
    q = linalg.quadform(model.chol_b_star, x - model.mu_star[:, k])
    cp1 = model.c_star[k] + 1.0
    return float(-0.5 * model.dim * np.log(cp1)) + _log_tail(q / cp1, 0.5 * (model.a_star + 1.0))


@dataclass(frozen=True)
class ClassPrior:
    """Prior probabilities over the K classes; must sum to one."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1:
            raise ShapeMismatch("class prior must be a vector")
        if np.any(probs < 0.0) or not np.all(np.isfinite(probs)):
            raise ValueError("class prior entries must be finite and non-negative")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValueError(f"class prior sums to {probs.sum()!r}, expected 1")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n_classes: int) -> "ClassPrior":
        return cls(np.full(n_classes, 1.0 / n_classes))


def _prior_probs(prior, n_classes: int) -> np.ndarray:
    if isinstance(prior, ClassPrior):
        probs = prior.probs
    else:
        probs = np.asarray(prior, dtype=np.float64)
        if np.any(probs < 0.0) or not np.all(np.isfinite(probs)):
            raise ValueError("class prior entries must be finite and non-negative")
    if probs.shape != (n_classes,):
        raise ShapeMismatch(
            f"class prior has length {probs.shape}, model has K={n_classes}"
        )
    total = float(probs.sum())
    if total == 0.0:
        raise AllZeroPrior("every class prior probability is zero")
    return probs / total


def posterior_from_scores(log_scores, prior) -> np.ndarray:
    """Softmax of log score + log prior, stable under large offsets.

    Classes with zero prior get exactly zero posterior. The output sums
    to one and is invariant under adding any constant to all scores.
    """
    log_scores = np.asarray(log_scores, dtype=np.float64)
    probs = _prior_probs(prior, log_scores.shape[0])
    active = probs > 0.0
    combined = np.full(log_scores.shape[0], -np.inf)
    combined[active] = log_scores[active] + np.log(probs[active])
    shifted = np.exp(combined - combined[active].max())
    return shifted / shifted.sum()


def class_posterior(model: PredictiveModel, x, prior) -> np.ndarray:
    """Posterior probability of each class for one pattern."""
    scores = np.array([log_predictive_unnormalized(model, x, k)
                       for k in range(model.n_classes)])
    return posterior_from_scores(scores, prior)


def zero_one_costs(n_classes: int) -> np.ndarray:
    """Cost matrix under which the best action is the most likely class."""
    return 1.0 - np.eye(n_classes)


def decide(posterior_probs, costs) -> int:
    """Minimum-expected-cost action index; ties go to the lowest index.

    ``costs[k, action]`` is the cost of taking ``action`` when the true
    class is k.
    """
    posterior_probs = np.asarray(posterior_probs, dtype=np.float64)
    costs = np.asarray(costs, dtype=np.float64)
    if costs.ndim != 2 or costs.shape[0] != posterior_probs.shape[0]:
        raise ShapeMismatch(
            f"cost matrix shape {costs.shape} does not match K={posterior_probs.shape[0]}"
        )
    if not np.all(np.isfinite(costs)):
        raise ValueError("cost matrix entries must be finite")
    expected = posterior_probs @ costs
    return int(np.argmin(expected))


def score_batch(model: PredictiveModel, patterns, prior, costs=None):
    """Score a batch of patterns.

    Returns ``(log_unnorm, posteriors, actions)`` with one row per
    pattern, in input order. ``costs`` defaults to zero-one costs, so
    actions are the most probable classes.
    """
    patterns = np.atleast_2d(np.asarray(patterns, dtype=np.float64))
    if patterns.shape[1] != model.dim:
        raise DimensionMismatch(
            f"patterns have {patterns.shape[1]} features, model dimension is {model.dim}"
        )
    if costs is None:
        costs = zero_one_costs(model.n_classes)
    n_rows = patterns.shape[0]
    log_unnorm = np.empty((n_rows, model.n_classes))
    posteriors = np.empty((n_rows, model.n_classes))
    actions = np.empty(n_rows, dtype=np.int64)
    for i in range(n_rows):
        for k in range(model.n_classes):
            log_unnorm[i, k] = log_predictive_unnormalized(model, patterns[i], k)
        posteriors[i] = posterior_from_scores(log_unnorm[i], prior)
        actions[i] = decide(posteriors[i], costs)
    return log_unnorm, posteriors, actions
