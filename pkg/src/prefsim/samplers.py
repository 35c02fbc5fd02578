"""Query selection over a fresh candidate pool: random, margin, or information.

All three samplers pick one comparison from the pool.  With no labeled
history yet, the model-based samplers fall back to uniform choice; ties in
candidate scores always resolve to the lowest pool index so replays are
exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bayes import bald_scores, fit_ard
from .core import Comparison, ComparisonPool, LabeledComparison, RandomSource
from .learner import Hypothesis, fit_svm
from .settings import SolverSettings, DEFAULT_SETTINGS

RANDOM = "random"
VERSION_SPACE = "version-space"
BAYES = "bayes"
SAMPLER_NAMES = (RANDOM, VERSION_SPACE, BAYES)


@dataclass(frozen=True)
class SamplerKind:
    """A named selection strategy plus the per-timestep candidate pool size."""

    kind: str
    pool_size: int = 1000

    def __post_init__(self):
        if self.kind not in SAMPLER_NAMES:
            raise ValueError(f"unknown sampler: {self.kind!r}")
        if self.pool_size < 1:
            raise ValueError(f"pool_size must be >= 1, got {self.pool_size}")


def _selected(pool: ComparisonPool, index: int) -> Comparison:
    return pool[int(index)]


def select_random(pool: ComparisonPool, rng: RandomSource) -> Comparison:
    """Uniform choice from the pool."""
    if len(pool) == 0:
        raise ValueError("empty candidate pool")
    return _selected(pool, rng.gen.integers(len(pool)))


def select_version_space(
    pool: ComparisonPool,
    history: list[LabeledComparison],
    rng: RandomSource,
    settings: SolverSettings = DEFAULT_SETTINGS,
    hypothesis: Hypothesis | None = None,
) -> Comparison:
    """Pick the candidate closest to the current max-margin decision boundary.

    A hypothesis already fitted on exactly this history may be passed in to
    skip the refit; fitting is deterministic, so the choice is identical.
    """
    if len(pool) == 0:
        raise ValueError("empty candidate pool")
    if not history:
        return select_random(pool, rng)
    if hypothesis is None:
        hypothesis = fit_svm(history, settings)
    scores = np.abs(pool.diffs @ hypothesis.w_hat)
    return _selected(pool, np.argmin(scores))


def select_bald(
    pool: ComparisonPool,
    history: list[LabeledComparison],
    rng: RandomSource,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> Comparison:
    """Pick the candidate with maximal expected information about the response."""
    if len(pool) == 0:
        raise ValueError("empty candidate pool")
    if not history:
        return select_random(pool, rng)
    post = fit_ard(history, settings)
    mu = pool.diffs @ post.mean
    sigma2 = np.einsum("ij,jk,ik->i", pool.diffs, post.covariance, pool.diffs)
    sigma2 = np.maximum(sigma2, 0.0)
    if settings.ard_noise_in_predictive:
        sigma2 = sigma2 + 1.0 / post.beta
    return _selected(pool, np.argmax(bald_scores(mu, sigma2)))


def select(
    sampler: SamplerKind,
    pool: ComparisonPool,
    history: list[LabeledComparison],
    rng: RandomSource,
    settings: SolverSettings = DEFAULT_SETTINGS,
    hypothesis: Hypothesis | None = None,
) -> Comparison:
    if sampler.kind == RANDOM:
        return select_random(pool, rng)
    if sampler.kind == VERSION_SPACE:
        return select_version_space(pool, history, rng, settings, hypothesis)
    return select_bald(pool, history, rng, settings)
