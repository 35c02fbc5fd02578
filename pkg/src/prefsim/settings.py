"""Numerical solver knobs, fixed here rather than tuned per run.

Values are deliberately conservative so every trial is cheap and
deterministic; sweeps that want to probe sensitivity can override them
through the run config's ``overrides`` block.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SolverSettings:
    # Hinge-loss fit: lam*||w||^2 + (1/n)*sum hinge, duality-gap stop.
    svm_lambda: float = 0.5
    svm_tol: float = 1e-6
    svm_max_passes: int = 100_000

    # Relevance-determination regression: hyperparameter update loop.
    ard_tol: float = 1e-4
    ard_max_iter: int = 300
    ard_alpha_min: float = 1e-6
    ard_alpha_max: float = 1e6
    # Whether predictive variance adds the observation noise 1/beta on top
    # of the weight-uncertainty term (the information score already accounts
    # for response stochasticity through its own link terms).
    ard_noise_in_predictive: bool = False


DEFAULT_SETTINGS = SolverSettings()
