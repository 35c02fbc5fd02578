import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefsim import (
    ArdPosterior,
    SolverSettings,
    bald_score,
    bald_scores,
    binary_entropy,
    fit_ard,
    gaussian_cdf,
    predictive,
)
from prefsim.bayes import ENTROPY_SCALE

from helpers import history_from_diffs

# Values computed by independent implementations: the information scores by a
# 50-digit mpmath evaluation of the closed form, the posterior mean by a
# numpy-free re-implementation of the update equations run to 1e-14.
BALD_1_1 = 0.22633869458726987689
BALD_05_2 = 0.3922789901971992994
BALD_2_05 = 0.056527025883125918012
PHI_1 = 0.84134474606854294859

ARD_ORACLE_DIFFS = [(2.0, 0.0), (0.0, 1.0), (1.0, 1.0), (3.0, -1.0), (1.0, 2.0)]
ARD_ORACLE_LABELS = [1, -1, 1, 1, -1]
ARD_ORACLE_MEAN = (0.3205901205491861, -0.3968517747365241)


class TestGaussianCdf:
    def test_zero(self):
        assert gaussian_cdf(0.0) == 0.5

    def test_symmetry(self):
        for x in np.linspace(-8, 8, 33):
            assert gaussian_cdf(x) + gaussian_cdf(-x) == pytest.approx(1.0, abs=1e-12)

    def test_value_at_one(self):
        assert gaussian_cdf(1.0) == pytest.approx(PHI_1, abs=1e-12)


class TestBinaryEntropy:
    def test_half_is_one_bit(self):
        assert binary_entropy(0.5) == 1.0

    def test_endpoints_zero(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    @given(st.floats(0.0, 1.0))
    @settings(max_examples=100)
    def test_symmetry(self, p):
        assert binary_entropy(p) == pytest.approx(binary_entropy(1.0 - p), abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            binary_entropy(-0.01)
        with pytest.raises(ValueError):
            binary_entropy(1.5)


class TestBaldScore:
    def test_no_uncertainty_is_zero(self):
        assert abs(bald_score(0.0, 0.0)) <= 1e-9

    def test_infinite_variance_limit_is_one(self):
        assert bald_score(0.0, 1e12) == pytest.approx(1.0, abs=1e-5)

    def test_against_high_precision_oracle(self):
        assert bald_score(1.0, 1.0) == pytest.approx(BALD_1_1, abs=1e-12)
        assert bald_score(0.5, 2.0) == pytest.approx(BALD_05_2, abs=1e-12)
        assert bald_score(2.0, 0.5) == pytest.approx(BALD_2_05, abs=1e-12)

    def test_mu_sign_symmetry(self):
        for mu in (0.3, 1.7, 9.0):
            for s in (0.0, 0.5, 4.0):
                assert bald_score(mu, s) == bald_score(-mu, s)

    def test_monotone_in_variance_at_zero_mean(self):
        # bald(0, s) = 1 - C / sqrt(s + C^2), strictly increasing in s.
        values = [bald_score(0.0, s) for s in np.linspace(0.1, 10.0, 40)]
        assert np.all(np.diff(values) > 0)
        for s in (0.1, 1.0, 10.0):
            closed = 1.0 - ENTROPY_SCALE / math.sqrt(s + ENTROPY_SCALE**2)
            assert bald_score(0.0, s) == pytest.approx(closed, abs=1e-12)

    def test_bounded_on_grid(self):
        mus, sigmas = np.meshgrid(np.linspace(-10, 10, 100), np.linspace(0, 100, 100))
        scores = bald_scores(mus.ravel(), sigmas.ravel())
        assert np.all(scores >= -1e-9) and np.all(scores <= 1 + 1e-9)

    def test_vector_matches_scalar(self):
        mu = np.array([0.0, 1.0, -2.5, 8.0])
        s = np.array([0.0, 1.0, 3.0, 0.2])
        vec = bald_scores(mu, s)
        for i in range(mu.size):
            assert vec[i] == pytest.approx(bald_score(mu[i], s[i]), abs=1e-12)

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            bald_score(0.0, -1.0)


class TestFitArd:
    def test_single_row_touches_only_its_coordinate(self):
        history = history_from_diffs([[1.0, 0.0, 0.0]], [1])
        post = fit_ard(history)
        assert post.mean[0] > 0
        assert post.mean[1] == 0.0 and post.mean[2] == 0.0

    def test_duplicated_rows_shrink_covariance(self):
        diffs = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        labels = [1, -1, 1]
        once = fit_ard(history_from_diffs(diffs, labels))
        twice = fit_ard(history_from_diffs(diffs + diffs, labels + labels))
        gap = once.covariance - twice.covariance
        assert np.all(np.linalg.eigvalsh((gap + gap.T) / 2) >= -1e-12)

    def test_matches_independent_oracle(self):
        post = fit_ard(history_from_diffs(ARD_ORACLE_DIFFS, ARD_ORACLE_LABELS))
        assert post.mean[0] == pytest.approx(ARD_ORACLE_MEAN[0], abs=1e-6)
        assert post.mean[1] == pytest.approx(ARD_ORACLE_MEAN[1], abs=1e-6)

    def test_covariance_symmetric_psd(self):
        rng = np.random.default_rng(0)
        diffs = rng.integers(-9, 10, size=(12, 4)).astype(float)
        labels = np.where(diffs @ np.array([1.0, -0.5, 0.0, 0.2]) > 0, 1, -1)
        post = fit_ard(history_from_diffs(diffs, labels))
        assert np.array_equal(post.covariance, post.covariance.T)
        assert np.all(np.linalg.eigvalsh(post.covariance) >= -1e-12)
        assert np.all(post.alpha >= 1e-6) and np.all(post.alpha <= 1e6)
        assert post.beta > 0

    def test_appending_row_never_grows_variance_fixed_hyper(self):
        # At fixed (alpha, beta) the posterior precision gains a rank-1 term,
        # so no diagonal entry of the covariance may increase.
        rng = np.random.default_rng(1)
        alpha = np.ones(3)
        beta = 2.0
        z = rng.integers(-9, 10, size=(6, 3)).astype(float)
        for n in range(1, 6):
            before = np.linalg.inv(np.diag(alpha) + beta * z[:n].T @ z[:n])
            after = np.linalg.inv(np.diag(alpha) + beta * z[: n + 1].T @ z[: n + 1])
            assert np.all(np.diag(after) <= np.diag(before) + 1e-12)

    def test_empty_history_rejected(self):
        with pytest.raises(ValueError):
            fit_ard([])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            fit_ard(history_from_diffs([[np.inf, 0.0]], [1]))


class TestPredictive:
    def _posterior(self):
        return ArdPosterior(
            mean=np.array([1.0, -2.0]),
            covariance=np.eye(2),
            alpha=np.ones(2),
            beta=4.0,
        )

    def test_zero_query(self):
        p = predictive(self._posterior(), np.zeros(2))
        assert p.mu == 0.0 and p.sigma2 == 0.0

    def test_identity_covariance_quadratic_form(self):
        p = predictive(self._posterior(), np.array([3.0, 4.0]))
        assert p.sigma2 == 25.0

    def test_mean_linearity(self):
        post = self._posterior()
        z = np.array([1.5, 2.0])
        assert predictive(post, 2 * z).mu == pytest.approx(2 * predictive(post, z).mu)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            predictive(self._posterior(), np.zeros(3))

    def test_noise_toggle_adds_observation_variance(self):
        post = self._posterior()
        z = np.array([1.0, 0.0])
        base = predictive(post, z)
        with_noise = predictive(post, z, SolverSettings(ard_noise_in_predictive=True))
        assert with_noise.sigma2 == pytest.approx(base.sigma2 + 1.0 / post.beta)
