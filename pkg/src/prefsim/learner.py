"""Max-margin fitting of linear response models over feature differences.

Each labeled comparison (x, x', r) becomes a training pair z = x - x',
y = 2r - 1, and the hypothesis is the minimiser of

    lam * ||w||^2 + (1/n) * sum_i max(0, 1 - y_i w.z_i)

with no intercept.  The solver is cyclic coordinate descent on the dual
box-constrained quadratic, run in a fixed order until the duality gap drops
below tolerance, so identical histories produce bitwise-identical weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import Comparison, LabeledComparison
from .settings import SolverSettings, DEFAULT_SETTINGS


@dataclass(frozen=True)
class Hypothesis:
    """Learned linear weights over feature differences (no intercept)."""

    w_hat: np.ndarray


def design_matrix(history: list[LabeledComparison]) -> tuple[np.ndarray, np.ndarray]:
    """Stack the history into (z, y) training arrays with y in {-1, +1}."""
    z = np.stack([lc.comparison.diff for lc in history])
    y = np.array([2 * lc.response - 1 for lc in history], dtype=float)
    return z, y


@njit(cache=True)
def _solve_hinge_dual(
    z: np.ndarray, y: np.ndarray, cost: float, tol: float, max_passes: int
) -> np.ndarray:
    n, d = z.shape
    alpha = np.zeros(n)
    w = np.zeros(d)
    q = np.zeros(n)
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += z[i, j] * z[i, j]
        q[i] = s
        if s == 0.0:
            # Constant hinge term: its dual variable sits at the box bound.
            alpha[i] = cost
    for _ in range(max_passes):
        for i in range(n):
            if q[i] == 0.0:
                continue
            margin = 0.0
            for j in range(d):
                margin += w[j] * z[i, j]
            margin *= y[i]
            new_alpha = alpha[i] - (margin - 1.0) / q[i]
            if new_alpha < 0.0:
                new_alpha = 0.0
            elif new_alpha > cost:
                new_alpha = cost
            delta = new_alpha - alpha[i]
            if delta != 0.0:
                for j in range(d):
                    w[j] += delta * y[i] * z[i, j]
                alpha[i] = new_alpha
        # Recompute w from alpha to cancel incremental drift, then check the gap.
        for j in range(d):
            w[j] = 0.0
        for i in range(n):
            if alpha[i] != 0.0:
                for j in range(d):
                    w[j] += alpha[i] * y[i] * z[i, j]
        wsq = 0.0
        for j in range(d):
            wsq += w[j] * w[j]
        primal = 0.5 * wsq
        dual = -0.5 * wsq
        for i in range(n):
            margin = 0.0
            for j in range(d):
                margin += w[j] * z[i, j]
            hinge = 1.0 - y[i] * margin
            if hinge > 0.0:
                primal += cost * hinge
            dual += alpha[i]
        if primal - dual < tol:
            break
    return w


def fit_svm(
    history: list[LabeledComparison],
    settings: SolverSettings = DEFAULT_SETTINGS,
    d: int | None = None,
) -> Hypothesis:
    """Fit the regularised hinge minimiser; an empty history gives zero weights."""
    if not history:
        return Hypothesis(np.zeros(d if d is not None else 0))
    z, y = design_matrix(history)
    if not np.isfinite(z).all():
        raise ValueError("non-finite feature values in training history")
    # lam*||w||^2 + (1/n)*sum hinge  ==  0.5*||w||^2 + cost*sum hinge
    # with cost = 1 / (2*lam*n).
    cost = 1.0 / (2.0 * settings.svm_lambda * len(history))
    w = _solve_hinge_dual(
        np.ascontiguousarray(z, dtype=np.float64),
        np.ascontiguousarray(y, dtype=np.float64),
        cost,
        settings.svm_tol,
        settings.svm_max_passes,
    )
    return Hypothesis(w)


def predict(h: Hypothesis, c: Comparison) -> int:
    """Predicted response 1[w.(x - x') > 0]; ties (including w = 0) give 0."""
    diff = c.diff
    if h.w_hat.shape[0] != diff.shape[0]:
        raise ValueError(
            f"dimension mismatch: hypothesis has d={h.w_hat.shape[0]}, "
            f"comparison has d={diff.shape[0]}"
        )
    return int(float(h.w_hat @ diff) > 0.0)
