"""Held-out response accuracy and normalised weight distance.

Reference responses are the agent's noiseless decisions at the evaluation
timestep, so a hypothesis equal to the agent's active weights scores
exactly 1.0.  Weight distance compares unit-normalised vectors and is only
defined for agents with a linear reference.
"""

from __future__ import annotations

import numpy as np

from .agents import AgentModel
from .core import ComparisonPool, FeatureSpace, RandomSource, sample_candidate_pool
from .learner import Hypothesis


class HeldoutSet:
    """A fixed evaluation set of comparisons with no zero feature differences."""

    def __init__(self, pool: ComparisonPool):
        self.comparisons = pool

    @staticmethod
    def sample(space: FeatureSpace, size: int, rng: RandomSource) -> "HeldoutSet":
        return HeldoutSet(sample_candidate_pool(space, size, rng))

    def __len__(self) -> int:
        return len(self.comparisons)


def accuracy(h: Hypothesis, agent: AgentModel, heldout: HeldoutSet, t: int) -> float:
    """Fraction of held-out comparisons where the hypothesis reproduces the
    agent's noiseless reference response at timestep ``t``."""
    pool = heldout.comparisons
    predictions = (pool.diffs @ h.w_hat > 0).astype(int)
    references = agent.reference_responses(pool.lefts, pool.rights, t)
    return float(np.mean(predictions == references))


def normalized_distance(w_hat: np.ndarray, w_ref: np.ndarray) -> float:
    """L2 distance between unit-normalised weight vectors, in [0, 2].

    A zero hypothesis has no direction and maps to the worst-case 2.0; a
    zero reference leaves the metric undefined.
    """
    w_hat = np.asarray(w_hat, dtype=float)
    w_ref = np.asarray(w_ref, dtype=float)
    if w_hat.shape != w_ref.shape:
        raise ValueError(f"dimension mismatch: {w_hat.shape} vs {w_ref.shape}")
    ref_norm = np.linalg.norm(w_ref)
    if ref_norm == 0:
        raise ValueError("reference weights are zero; distance undefined")
    hat_norm = np.linalg.norm(w_hat)
    if hat_norm == 0:
        return 2.0
    return float(np.linalg.norm(w_hat / hat_norm - w_ref / ref_norm))
