"""The online elicitation loop: sample, query, record, refit, evaluate.

One trial is fully determined by its seed.  Randomness is partitioned into
labelled streams (agent construction, agent noise, held-out sampling, pool
sampling, selection) so that the agent and evaluation set are identical
across samplers run with the same seed, enabling paired comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .agents import AgentModel, AgentSpec, build_agent
from .core import Comparison, FeatureSpace, LabeledComparison, RandomSource, sample_candidate_pool
from .learner import Hypothesis, fit_svm
from .metrics import HeldoutSet, accuracy, normalized_distance
from .samplers import SamplerKind, select
from .settings import SolverSettings, DEFAULT_SETTINGS


@dataclass(frozen=True)
class TrialConfig:
    """Everything needed to replay one elicitation trial exactly."""

    space: FeatureSpace
    agent: AgentSpec
    sampler: SamplerKind
    n_comparisons: int
    seed: int
    heldout_size: int = 1000
    settings: SolverSettings = DEFAULT_SETTINGS

    def __post_init__(self):
        if self.n_comparisons < 1:
            raise ValueError(f"need n_comparisons >= 1, got {self.n_comparisons}")
        if self.heldout_size < 1:
            raise ValueError(f"need heldout_size >= 1, got {self.heldout_size}")


@dataclass(frozen=True)
class TrialStep:
    """One timestep of a trace: the query, the response, and the fitted model."""

    t: int
    comparison: Comparison
    response: int
    w_hat: np.ndarray
    accuracy: float
    norm_distance: float | None


@dataclass
class TrialTrace:
    config: TrialConfig
    steps: list[TrialStep] = field(default_factory=list)
    agent_weights: np.ndarray | None = None
    heldout_fingerprint: float = 0.0

    @property
    def final_hypothesis(self) -> Hypothesis:
        return Hypothesis(self.steps[-1].w_hat)


class TrialError(RuntimeError):
    """A trial failed mid-loop; carries the timestep that was running."""

    def __init__(self, timestep: int, cause: Exception):
        super().__init__(f"trial failed at timestep {timestep}: {cause}")
        self.timestep = timestep
        self.cause = cause


def run_trial(cfg: TrialConfig) -> TrialTrace:
    """Run the full loop for one agent and one sampler, evaluating every step."""
    agent_rng = RandomSource(cfg.seed, "agent")
    noise_rng = RandomSource(cfg.seed, "noise")
    heldout_rng = RandomSource(cfg.seed, "heldout")
    pool_rng = RandomSource(cfg.seed, "pool")
    select_rng = RandomSource(cfg.seed, "select")

    agent = build_agent(cfg.agent, cfg.space, agent_rng, noise_rng)
    heldout = HeldoutSet.sample(cfg.space, cfg.heldout_size, heldout_rng)

    trace = TrialTrace(
        config=cfg,
        agent_weights=_agent_weight_snapshot(agent),
        heldout_fingerprint=float(heldout.comparisons.diffs.sum()),
    )
    history: list[LabeledComparison] = []
    hypothesis = Hypothesis(np.zeros(cfg.space.d))
    for t in range(1, cfg.n_comparisons + 1):
        try:
            pool = sample_candidate_pool(cfg.space, cfg.sampler.pool_size, pool_rng)
            chosen = select(
                cfg.sampler, pool, history, select_rng, cfg.settings, hypothesis
            )
            response = agent.respond(chosen, t)
            history.append(LabeledComparison(chosen, response, t))
            hypothesis = fit_svm(history, cfg.settings, d=cfg.space.d)
            acc = accuracy(hypothesis, agent, heldout, t)
            w_ref = agent.reference_weights(t)
            dist = (
                normalized_distance(hypothesis.w_hat, w_ref)
                if w_ref is not None
                else None
            )
        except Exception as exc:  # noqa: BLE001 - abort carries the timestep
            raise TrialError(t, exc) from exc
        trace.steps.append(
            TrialStep(t, chosen, response, hypothesis.w_hat, acc, dist)
        )
    return trace


def _agent_weight_snapshot(agent: AgentModel) -> np.ndarray | None:
    if agent.instability is not None:
        return np.concatenate([agent.instability.w_pre, agent.instability.w_post])
    return agent.summary_weights
