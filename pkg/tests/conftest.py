import pytest


@pytest.fixture(scope="session", autouse=True)
def warm_solver():
    """Trigger the JIT compile once so timing-sensitive tests are unaffected."""
    from prefsim import fit_svm

    from helpers import history_from_diffs

    fit_svm(history_from_diffs([[1.0, 0.0]], [1]))
