"""Bayesian linear regression with per-feature relevance determination.

Responses are regressed as +/-1 targets on feature differences under a
Gaussian likelihood with precision beta and independent zero-mean weight
priors with precisions alpha_i.  Hyperparameters are updated by MAP
evidence maximisation under Gamma(1, 1) priors, which adds 2 to each update
denominator and nothing to the numerators.  The posterior feeds a
closed-form information score for candidate queries: the expected reduction
in response entropy under a probit link, measured in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .core import LabeledComparison
from .learner import design_matrix
from .settings import SolverSettings, DEFAULT_SETTINGS

#: Scale constant of the squared-exponential approximation to binary entropy.
ENTROPY_SCALE = math.sqrt(math.pi * math.log(2.0) / 2.0)


@dataclass(frozen=True)
class ArdPosterior:
    """Gaussian weight posterior plus the fitted precision hyperparameters."""

    mean: np.ndarray
    covariance: np.ndarray
    alpha: np.ndarray
    beta: float


@dataclass(frozen=True)
class PredictiveMoments:
    """Mean and variance of the latent value at one query."""

    mu: float
    sigma2: float


def gaussian_cdf(x: float) -> float:
    """Standard normal CDF."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def binary_entropy(p: float) -> float:
    """Base-2 entropy of a Bernoulli(p), with 0*log(0) = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def bald_score(mu: float, sigma2: float) -> float:
    """Information gain (bits) of observing the response at a query.

    Evaluates the closed-form probit-link estimate from the posterior
    predictive moments of the latent value.  The estimate is clamped into
    [0, 1]: the underlying approximation can dip a fraction of a millibit
    below zero near zero variance, while the true information gain cannot.
    """
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    # The score depends on mu only through mu^2; evaluating at |mu| makes the
    # sign symmetry exact in floating point as well.
    mu = float(np.clip(abs(mu), 0.0, 1e12))
    sigma2 = float(np.clip(sigma2, 0.0, 1e12))
    c2 = ENTROPY_SCALE**2
    p = gaussian_cdf(mu / math.sqrt(sigma2 + 1.0))
    expected = (
        ENTROPY_SCALE
        * math.exp(-(mu**2) / (2.0 * (sigma2 + c2)))
        / math.sqrt(sigma2 + c2)
    )
    return min(max(binary_entropy(p) - expected, 0.0), 1.0)


def bald_scores(mu: np.ndarray, sigma2: np.ndarray) -> np.ndarray:
    """Vectorised :func:`bald_score` over candidate arrays."""
    mu = np.clip(np.abs(np.asarray(mu, dtype=float)), 0.0, 1e12)
    sigma2 = np.clip(np.asarray(sigma2, dtype=float), 0.0, 1e12)
    c2 = ENTROPY_SCALE**2
    p = ndtr(mu / np.sqrt(sigma2 + 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p)
    ent = np.where((p <= 0.0) | (p >= 1.0), 0.0, ent)
    expected = (
        ENTROPY_SCALE * np.exp(-(mu**2) / (2.0 * (sigma2 + c2))) / np.sqrt(sigma2 + c2)
    )
    return np.clip(ent - expected, 0.0, 1.0)


def fit_ard(
    history: list[LabeledComparison], settings: SolverSettings = DEFAULT_SETTINGS
) -> ArdPosterior:
    """Fit the relevance-determined posterior over feature-difference weights.

    Alternates the Gaussian posterior update with MAP hyperparameter
    updates until the largest relative change of any precision falls below
    tolerance, with per-feature precisions clamped to a finite range.
    """
    if not history:
        raise ValueError("fit_ard needs a non-empty history")
    z, y = design_matrix(history)
    if not (np.isfinite(z).all() and np.isfinite(y).all()):
        raise ValueError("non-finite values in training history")
    return _fit_ard_arrays(z, y, settings)


def _fit_ard_arrays(
    z: np.ndarray, y: np.ndarray, settings: SolverSettings
) -> ArdPosterior:
    n, d = z.shape
    ztz = z.T @ z
    zty = z.T @ y
    alpha = np.ones(d)
    beta = 1.0
    mean = np.zeros(d)
    cov = np.eye(d)
    for _ in range(settings.ard_max_iter):
        cov = np.linalg.inv(np.diag(alpha) + beta * ztz)
        cov = (cov + cov.T) / 2.0
        mean = beta * (cov @ zty)
        resid = y - z @ mean
        # Gamma(1,1) MAP corrections add 2 to both denominators.
        new_alpha = np.clip(
            1.0 / (mean**2 + np.diag(cov) + 2.0),
            settings.ard_alpha_min,
            settings.ard_alpha_max,
        )
        new_beta = n / (resid @ resid + np.einsum("ij,jk,ik->", z, cov, z) + 2.0)
        rel = max(
            float(np.max(np.abs(new_alpha - alpha) / np.abs(alpha))),
            abs(new_beta - beta) / abs(beta),
        )
        alpha, beta = new_alpha, float(new_beta)
        if rel < settings.ard_tol:
            break
    cov = np.linalg.inv(np.diag(alpha) + beta * ztz)
    cov = (cov + cov.T) / 2.0
    mean = beta * (cov @ zty)
    return ArdPosterior(mean, cov, alpha, beta)


def predictive(
    post: ArdPosterior, z: np.ndarray, settings: SolverSettings = DEFAULT_SETTINGS
) -> PredictiveMoments:
    """Posterior predictive moments of the latent value at difference ``z``."""
    z = np.asarray(z, dtype=float)
    if z.shape != post.mean.shape:
        raise ValueError(
            f"dimension mismatch: posterior has d={post.mean.shape[0]}, "
            f"query has shape {z.shape}"
        )
    mu = float(post.mean @ z)
    sigma2 = float(z @ post.covariance @ z)
    if settings.ard_noise_in_predictive:
        sigma2 += 1.0 / post.beta
    return PredictiveMoments(mu, max(sigma2, 0.0))
