"""Shared constructors for test histories."""

import numpy as np

from prefsim import Comparison, LabeledComparison


def history_from_diffs(diffs, labels):
    """Build a labeled history whose feature differences are exactly `diffs`.

    Uses right = 0 so left - right = z; responses are 1 for y=+1, 0 for y=-1.
    """
    out = []
    for t, (z, y) in enumerate(zip(diffs, labels), start=1):
        left = np.asarray(z, dtype=float)
        right = np.zeros_like(left)
        out.append(LabeledComparison(Comparison(left, right), 1 if y > 0 else 0, t))
    return out


def history_from_cases(triples):
    """Build a history from (left, right, response) triples."""
    return [
        LabeledComparison(
            Comparison(np.asarray(l, dtype=float), np.asarray(r, dtype=float)), resp, t
        )
        for t, (l, r, resp) in enumerate(triples, start=1)
    ]
