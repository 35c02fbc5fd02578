"""Synthetic respondents: utility models, weight-change schedules, and noise.

An :class:`AgentModel` answers comparisons with 0/1 responses.  Its utility
is one of four kinds (linear, shallow tree, linear-plus-interactions, or
linear over a partially hidden feature set), optionally rescheduled once at
a change timestep, and optionally perturbed by response or preference noise.
Ties in utility yield response 0, matching the strict preference indicator.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .core import BINARY_KIND, Case, Comparison, FeatureSpace, RandomSource

DOWNSCALE_ORDERED = "downscale-ordered"
DOWNSCALE_RANDOM = "downscale-random"
DOWNSCALE_ORDERED_2 = "downscale-ordered-2"
DOWNSCALE_ORDERED_4 = "downscale-ordered-4"
UPSCALE_ORDERED = "upscale-ordered"
UPSCALE_RANDOM = "upscale-random"
UPSCALE_ORDERED_2 = "upscale-ordered-2"
UPSCALE_ORDERED_4 = "upscale-ordered-4"
RANDOM_SWITCH = "random-switch"

INSTABILITY_SCENARIOS = (
    DOWNSCALE_ORDERED,
    DOWNSCALE_RANDOM,
    DOWNSCALE_ORDERED_2,
    DOWNSCALE_ORDERED_4,
    UPSCALE_ORDERED,
    UPSCALE_RANDOM,
    UPSCALE_ORDERED_2,
    UPSCALE_ORDERED_4,
    RANDOM_SWITCH,
)

# Number of features kept on the sparse side of each scenario (None: none kept).
_SCENARIO_KEEP = {
    DOWNSCALE_ORDERED: 1,
    DOWNSCALE_ORDERED_2: 2,
    DOWNSCALE_ORDERED_4: 4,
    DOWNSCALE_RANDOM: 1,
    UPSCALE_ORDERED: 1,
    UPSCALE_ORDERED_2: 2,
    UPSCALE_ORDERED_4: 4,
    UPSCALE_RANDOM: 1,
    RANDOM_SWITCH: None,
}

NOISE_NONE = "none"
NOISE_RESPONSE = "response"
NOISE_PREFERENCE = "preference"


@dataclass(frozen=True)
class LinearUtility:
    """Weighted sum of feature values."""

    w: np.ndarray


@dataclass(frozen=True)
class TreeUtility:
    """A complete binary decision tree assigning one utility per leaf.

    Internal nodes are stored in heap order (children of node ``i`` are
    ``2i+1`` and ``2i+2``); descent goes left when the split feature's value
    is <= the threshold.
    """

    depth: int
    features: np.ndarray  # (2**depth - 1,) feature index per internal node
    thresholds: np.ndarray  # (2**depth - 1,)
    leaves: np.ndarray  # (2**depth,)


@dataclass(frozen=True)
class InteractionUtility:
    """Linear utility plus weighted second-order feature products."""

    w: np.ndarray
    pairs: tuple[tuple[int, int], ...]
    pair_weights: np.ndarray


@dataclass
class HiddenFeatureUtility:
    """Linear utility over the visible features plus ``m`` hidden ones.

    Hidden feature values for a case are drawn uniformly from the feature
    range the first time that case is presented and are then fixed for the
    rest of the trial, keyed by the case's values.  The learner only ever
    sees the first ``d`` features.
    """

    w_full: np.ndarray
    d: int
    m: int
    space: FeatureSpace
    value_key: bytes
    _cache: dict = field(default_factory=dict, repr=False)

    def hidden_values(self, cases: np.ndarray) -> np.ndarray:
        out = np.empty((cases.shape[0], self.m))
        for i in range(cases.shape[0]):
            key = cases[i].tobytes()
            vals = self._cache.get(key)
            if vals is None:
                digest = hashlib.blake2b(key, digest_size=8, key=self.value_key).digest()
                rng = RandomSource(int.from_bytes(digest, "big"), "hidden-values")
                vals = self.space.sample_values(rng, self.m)
                self._cache[key] = vals
            out[i] = vals
        return out


@dataclass(frozen=True)
class InstabilitySchedule:
    """One scheduled weight change: ``w_pre`` before ``t_change``, ``w_post`` after."""

    t_change: int
    w_pre: np.ndarray
    w_post: np.ndarray
    scenario: str

    def active_weights(self, t: int) -> np.ndarray:
        return self.w_pre if t < self.t_change else self.w_post


@dataclass(frozen=True)
class NoiseSpec:
    """Response or preference noise with optionally time-decaying scale."""

    kind: str = NOISE_NONE
    sigma: float = 0.0
    time_variant: bool = False

    def __post_init__(self):
        if self.kind not in (NOISE_NONE, NOISE_RESPONSE, NOISE_PREFERENCE):
            raise ValueError(f"unknown noise kind: {self.kind!r}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")

    def effective_sigma(self, t: int) -> float:
        if self.kind == NOISE_NONE:
            return 0.0
        return self.sigma / math.sqrt(t) if self.time_variant else self.sigma


def _keep_top_k(w: np.ndarray, k: int) -> np.ndarray:
    """Zero all but the k largest-magnitude components (stable order on ties)."""
    kept = np.zeros_like(w)
    order = np.argsort(-np.abs(w), kind="stable")[:k]
    kept[order] = w[order]
    return kept


def _keep_index(w: np.ndarray, i: int) -> np.ndarray:
    kept = np.zeros_like(w)
    kept[i] = w[i]
    return kept


def make_instability(
    scenario: str, d: int, t_change: int, rng: RandomSource
) -> InstabilitySchedule:
    """Build the pre/post weight pair for one of the named change scenarios."""
    if scenario not in INSTABILITY_SCENARIOS:
        raise ValueError(f"unknown instability scenario: {scenario!r}")
    keep = _SCENARIO_KEEP[scenario]
    if keep is not None and d < keep:
        raise ValueError(f"scenario {scenario!r} needs d >= {keep}, got {d}")
    if t_change < 1:
        raise ValueError(f"t_change must be >= 1, got {t_change}")

    def unif() -> np.ndarray:
        return rng.gen.uniform(-1.0, 1.0, d)

    if scenario == RANDOM_SWITCH:
        w_pre, w_post = unif(), unif()
    elif scenario in (DOWNSCALE_ORDERED, DOWNSCALE_ORDERED_2, DOWNSCALE_ORDERED_4):
        w_pre = unif()
        w_post = _keep_top_k(w_pre, keep)
    elif scenario == DOWNSCALE_RANDOM:
        w_pre = unif()
        w_post = _keep_index(w_pre, int(rng.gen.integers(d)))
    elif scenario in (UPSCALE_ORDERED, UPSCALE_ORDERED_2, UPSCALE_ORDERED_4):
        w_post = unif()
        w_pre = _keep_top_k(w_post, keep)
    else:  # upscale-random
        w_post = unif()
        w_pre = _keep_index(w_post, int(rng.gen.integers(d)))
    return InstabilitySchedule(t_change, w_pre, w_post, scenario)


def make_tree_utility(d: int, space: FeatureSpace, rng: RandomSource) -> TreeUtility:
    """Random complete tree of depth ``floor(log2 d)`` over the given space.

    Each internal node splits a uniformly chosen feature at a threshold
    strictly inside the feature range (0.5 for binary spaces, half-integers
    for integer ranges); leaf utilities are uniform on [-1, 1].
    """
    if d < 2:
        raise ValueError(f"tree utilities need d >= 2, got {d}")
    depth = int(math.floor(math.log2(d)))
    n_internal = 2**depth - 1
    features = rng.gen.integers(0, d, n_internal)
    if space.kind == BINARY_KIND:
        thresholds = np.full(n_internal, 0.5)
    else:
        thresholds = rng.gen.integers(space.lo, space.hi, n_internal) + 0.5
    leaves = rng.gen.uniform(-1.0, 1.0, 2**depth)
    return TreeUtility(depth, features, thresholds, leaves)


def make_interaction_utility(d: int, k: int, rng: RandomSource) -> InteractionUtility:
    """Linear weights plus ``k`` distinct unordered feature pairs, all uniform."""
    max_pairs = d * (d - 1) // 2
    if not 0 <= k <= max_pairs:
        raise ValueError(f"k must be in [0, {max_pairs}] for d={d}, got {k}")
    w = rng.gen.uniform(-1.0, 1.0, d)
    all_pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    if k > 0:
        chosen = rng.gen.choice(len(all_pairs), size=k, replace=False)
        pairs = tuple(all_pairs[i] for i in chosen)
        pair_weights = rng.gen.uniform(-1.0, 1.0, k)
    else:
        pairs = ()
        pair_weights = np.zeros(0)
    return InteractionUtility(w, pairs, pair_weights)


def make_hidden_feature_utility(
    d: int, m: int, space: FeatureSpace, rng: RandomSource
) -> HiddenFeatureUtility:
    """Linear utility over ``d + m`` features of which the last ``m`` stay hidden."""
    if d < 1 or m < 1:
        raise ValueError(f"need d >= 1 and m >= 1, got d={d}, m={m}")
    w_full = rng.gen.uniform(-1.0, 1.0, d + m)
    value_key = hashlib.blake2b(
        f"{rng.seed}:{rng.label}:hidden-values".encode(), digest_size=16
    ).digest()
    return HiddenFeatureUtility(w_full, d, m, space, value_key)


@dataclass(frozen=True)
class AgentSpec:
    """Declarative description of an agent, expanded by :func:`build_agent`."""

    kind: str = "linear"  # linear | tree | interaction | hidden
    instability: str | None = None
    t_change: int | None = None
    noise_kind: str = NOISE_NONE
    sigma: float = 0.0
    time_variant: bool = False
    interactions: int = 0
    hidden_features: int = 0


class AgentModel:
    """A synthetic respondent bound to one trial's random streams.

    ``respond`` applies the configured noise; the ``reference_*`` methods
    give the noiseless ground truth used for evaluation (active weights
    under a schedule, summary weights under preference noise, the exact
    deterministic utility otherwise).
    """

    def __init__(
        self,
        space: FeatureSpace,
        utility,
        noise: NoiseSpec,
        noise_rng: RandomSource,
        instability: InstabilitySchedule | None = None,
    ):
        if instability is not None and not isinstance(utility, LinearUtility):
            raise ValueError("instability schedules require a linear utility")
        if noise.kind == NOISE_PREFERENCE and not isinstance(utility, LinearUtility):
            raise ValueError("preference noise requires a linear utility")
        self.space = space
        self.utility = utility
        self.noise = noise
        self.noise_rng = noise_rng
        self.instability = instability

    @property
    def summary_weights(self) -> np.ndarray | None:
        """The weight vector w* that preference noise is centred on."""
        if isinstance(self.utility, LinearUtility):
            return self.utility.w
        return None

    def utility_batch(self, cases: np.ndarray, t: int) -> np.ndarray:
        """Deterministic utilities for an (n, d) matrix of cases at timestep t."""
        u = self.utility
        if isinstance(u, LinearUtility):
            w = self.instability.active_weights(t) if self.instability else u.w
            return cases @ w
        if isinstance(u, TreeUtility):
            return _tree_utilities(u, cases)
        if isinstance(u, InteractionUtility):
            vals = cases @ u.w
            for (i, j), pw in zip(u.pairs, u.pair_weights):
                vals = vals + pw * cases[:, i] * cases[:, j]
            return vals
        full = np.hstack([cases, u.hidden_values(cases)])
        return full @ u.w_full

    def utility_gap_batch(self, lefts: np.ndarray, rights: np.ndarray, t: int) -> np.ndarray:
        """Deterministic u(left) - u(right) per row.

        Linear utilities evaluate the gap as w.(left - right), the same
        arithmetic the prediction side uses, so a hypothesis equal to the
        agent's weights agrees with the reference even on exact ties.
        """
        u = self.utility
        if isinstance(u, LinearUtility):
            w = self.instability.active_weights(t) if self.instability else u.w
            return (lefts - rights) @ w
        return self.utility_batch(lefts, t) - self.utility_batch(rights, t)

    def reference_responses(self, lefts: np.ndarray, rights: np.ndarray, t: int) -> np.ndarray:
        """Noiseless 0/1 responses; strict inequality, ties give 0."""
        return (self.utility_gap_batch(lefts, rights, t) > 0).astype(int)

    def reference_weights(self, t: int) -> np.ndarray | None:
        """Weights defining the evaluation reference, when the agent has any."""
        if not isinstance(self.utility, LinearUtility):
            return None
        if self.instability is not None:
            return self.instability.active_weights(t)
        return self.utility.w

    def respond(self, c: Comparison, t: int) -> int:
        """Answer one comparison at timestep t, applying the configured noise."""
        if t < 1:
            raise ValueError(f"timestep must be >= 1, got {t}")
        sigma = self.noise.effective_sigma(t)
        if self.noise.kind == NOISE_PREFERENCE and sigma > 0:
            w_star = self.utility.w
            w = w_star + self.noise_rng.gen.normal(0.0, 1.0, w_star.shape[0]) * (
                sigma / math.sqrt(w_star.shape[0])
            )
            return int(w @ (c.left - c.right) > 0)
        gap = float(self.utility_gap_batch(c.left[None, :], c.right[None, :], t)[0])
        if self.noise.kind == NOISE_RESPONSE and sigma > 0:
            gap += self.noise_rng.gen.normal(0.0, sigma)
        return int(gap > 0)

    def reference_respond(self, c: Comparison, t: int) -> int:
        return int(
            self.reference_responses(c.left[None, :], c.right[None, :], t)[0]
        )


def _tree_utilities(tree: TreeUtility, cases: np.ndarray) -> np.ndarray:
    n = cases.shape[0]
    node = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    for _ in range(tree.depth):
        go_right = cases[rows, tree.features[node]] > tree.thresholds[node]
        node = 2 * node + 1 + go_right
    return tree.leaves[node - (2**tree.depth - 1)]


def utility_of(agent: AgentModel, case: Case, t: int) -> float:
    """Deterministic utility of one case at timestep t."""
    return float(agent.utility_batch(np.asarray(case, dtype=float)[None, :], t)[0])


def respond(agent: AgentModel, c: Comparison, t: int) -> int:
    return agent.respond(c, t)


def build_agent(
    spec: AgentSpec,
    space: FeatureSpace,
    construct_rng: RandomSource,
    noise_rng: RandomSource,
) -> AgentModel:
    """Materialise an agent from its spec using the trial's labelled streams."""
    noise = NoiseSpec(spec.noise_kind, spec.sigma, spec.time_variant)
    instability = None
    if spec.kind == "linear":
        if spec.instability is not None:
            if spec.t_change is None:
                raise ValueError("instability scenarios need a t_change")
            instability = make_instability(
                spec.instability, space.d, spec.t_change, construct_rng
            )
            utility = LinearUtility(instability.w_pre)
        else:
            utility = LinearUtility(construct_rng.gen.uniform(-1.0, 1.0, space.d))
    elif spec.kind == "tree":
        utility = make_tree_utility(space.d, space, construct_rng)
    elif spec.kind == "interaction":
        utility = make_interaction_utility(space.d, spec.interactions, construct_rng)
    elif spec.kind == "hidden":
        utility = make_hidden_feature_utility(
            space.d, spec.hidden_features, space, construct_rng
        )
    else:
        raise ValueError(f"unknown agent kind: {spec.kind!r}")
    return AgentModel(space, utility, noise, noise_rng, instability)
