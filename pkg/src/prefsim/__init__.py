"""Deterministic simulation of online pairwise preference elicitation.

Three query-selection strategies (random, margin-based, information-based)
are compared against synthetic agents whose preferences may change over
time, fall outside the learner's hypothesis class, or answer noisily.
"""

from .agents import (
    AgentModel,
    AgentSpec,
    INSTABILITY_SCENARIOS,
    InstabilitySchedule,
    InteractionUtility,
    HiddenFeatureUtility,
    LinearUtility,
    NoiseSpec,
    TreeUtility,
    build_agent,
    make_hidden_feature_utility,
    make_instability,
    make_interaction_utility,
    make_tree_utility,
    respond,
    utility_of,
)
from .bayes import (
    ArdPosterior,
    PredictiveMoments,
    bald_score,
    bald_scores,
    binary_entropy,
    fit_ard,
    gaussian_cdf,
    predictive,
)
from .core import (
    Comparison,
    ComparisonPool,
    DegenerateSpaceError,
    FeatureSpace,
    LabeledComparison,
    RandomSource,
    feature_diff,
    sample_candidate_pool,
    sample_case,
)
from .elicitation import TrialConfig, TrialError, TrialStep, TrialTrace, run_trial
from .learner import Hypothesis, fit_svm, predict
from .metrics import HeldoutSet, accuracy, normalized_distance
from .samplers import (
    SAMPLER_NAMES,
    SamplerKind,
    select,
    select_bald,
    select_random,
    select_version_space,
)
from .scenarios import (
    Cell,
    ExperimentSpec,
    SummaryRow,
    TrialTask,
    builtin_catalogue,
    derive_seed,
    expand,
    summarize,
    trace_rows,
)
from .settings import DEFAULT_SETTINGS, SolverSettings

__version__ = "0.1.0"

__all__ = [
    "AgentModel",
    "AgentSpec",
    "ArdPosterior",
    "Cell",
    "Comparison",
    "ComparisonPool",
    "DEFAULT_SETTINGS",
    "DegenerateSpaceError",
    "ExperimentSpec",
    "FeatureSpace",
    "HeldoutSet",
    "HiddenFeatureUtility",
    "Hypothesis",
    "INSTABILITY_SCENARIOS",
    "InstabilitySchedule",
    "InteractionUtility",
    "LabeledComparison",
    "LinearUtility",
    "NoiseSpec",
    "PredictiveMoments",
    "RandomSource",
    "SAMPLER_NAMES",
    "SamplerKind",
    "SolverSettings",
    "SummaryRow",
    "TreeUtility",
    "TrialConfig",
    "TrialError",
    "TrialStep",
    "TrialTask",
    "TrialTrace",
    "accuracy",
    "bald_score",
    "bald_scores",
    "binary_entropy",
    "build_agent",
    "builtin_catalogue",
    "derive_seed",
    "expand",
    "feature_diff",
    "fit_ard",
    "fit_svm",
    "gaussian_cdf",
    "make_hidden_feature_utility",
    "make_instability",
    "make_interaction_utility",
    "make_tree_utility",
    "normalized_distance",
    "predict",
    "predictive",
    "respond",
    "run_trial",
    "sample_candidate_pool",
    "sample_case",
    "select",
    "select_bald",
    "select_random",
    "select_version_space",
    "summarize",
    "trace_rows",
    "utility_of",
]
