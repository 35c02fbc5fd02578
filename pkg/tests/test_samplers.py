import numpy as np
import pytest

from prefsim import (
    ArdPosterior,
    ComparisonPool,
    FeatureSpace,
    Hypothesis,
    RandomSource,
    SamplerKind,
    bald_score,
    fit_ard,
    fit_svm,
    predictive,
    sample_candidate_pool,
    select,
    select_bald,
    select_random,
    select_version_space,
)

from helpers import history_from_diffs


def pool_from_diffs(diffs):
    """A pool whose feature differences are exactly `diffs` (right = 0)."""
    lefts = np.asarray(diffs, dtype=float)
    return ComparisonPool(lefts, np.zeros_like(lefts))


class TestSamplerKind:
    def test_validation(self):
        with pytest.raises(ValueError):
            SamplerKind("genetic")
        with pytest.raises(ValueError):
            SamplerKind("random", 0)


class TestSelectRandom:
    def test_single_element_pool(self):
        pool = pool_from_diffs([[1.0, 2.0]])
        chosen = select_random(pool, RandomSource(0, "s"))
        assert np.array_equal(chosen.diff, np.array([1.0, 2.0]))

    def test_uniform_over_pool(self):
        pool = pool_from_diffs([[float(i), 1.0] for i in range(10)])
        rng = RandomSource(123, "s")
        counts = np.zeros(10)
        for _ in range(100_000):
            counts[int(select_random(pool, rng).diff[0])] += 1
        freq = counts / counts.sum()
        sigma = np.sqrt(0.1 * 0.9 / 100_000)
        assert np.all(np.abs(freq - 0.1) <= 5 * sigma)

    def test_same_seed_same_choice(self):
        pool = pool_from_diffs([[float(i)] for i in range(50)])
        a = select_random(pool, RandomSource(9, "s"))
        b = select_random(pool, RandomSource(9, "s"))
        assert np.array_equal(a.diff, b.diff)

    def test_empty_pool(self):
        with pytest.raises(ValueError):
            select_random(pool_from_diffs(np.zeros((0, 2))), RandomSource(0, "s"))


class TestSelectVersionSpace:
    def test_exact_zero_margin_candidate(self):
        history = history_from_diffs([[4.0, 0.0]], [1])  # learned w ~ (c, 0)
        pool = pool_from_diffs([[4.0, 1.0], [0.0, 7.0], [-2.0, 2.0]])
        chosen = select_version_space(pool, history, RandomSource(0, "s"))
        assert np.array_equal(chosen.diff, np.array([0.0, 7.0]))

    def test_degenerate_fit_ties_to_index_zero(self):
        # Contradictory one-dimensional labels drive the fit toward w = 0 ties;
        # force the degenerate hypothesis directly to pin the tie rule.
        pool = pool_from_diffs([[1.0], [2.0], [3.0]])
        history = history_from_diffs([[1.0]], [1])
        chosen = select_version_space(
            pool, history, RandomSource(0, "s"), hypothesis=Hypothesis(np.zeros(1))
        )
        assert np.array_equal(chosen.diff, np.array([1.0]))

    def test_matches_exhaustive_oracle(self):
        rng = RandomSource(17, "vs")
        space = FeatureSpace(d=2)
        diffs = rng.gen.integers(-9, 10, size=(4, 2)).astype(float)
        labels = np.where(diffs @ np.array([0.8, -0.3]) > 0, 1, -1)
        history = history_from_diffs(diffs, labels)
        pool = sample_candidate_pool(space, 5, rng)
        chosen = select_version_space(pool, history, rng)
        w = fit_svm(history).w_hat
        scores = [abs(float(w @ pool[i].diff)) for i in range(len(pool))]
        best = min(range(len(pool)), key=lambda i: (scores[i], i))
        assert np.array_equal(chosen.diff, pool[best].diff)

    def test_scale_invariance_of_choice(self):
        pool = pool_from_diffs([[3.0, 1.0], [1.0, -2.0], [0.5, 4.0]])
        history = history_from_diffs([[5.0, 1.0], [-1.0, -4.0]], [1, -1])
        base = fit_svm(history)
        for scale in (1e-3, 7.0, 1e4):
            scaled = Hypothesis(base.w_hat * scale)
            a = select_version_space(pool, history, RandomSource(0, "s"), hypothesis=base)
            b = select_version_space(pool, history, RandomSource(0, "s"), hypothesis=scaled)
            assert np.array_equal(a.diff, b.diff)

    def test_cold_start_reduces_to_random(self):
        pool = pool_from_diffs([[float(i)] for i in range(20)])
        a = select_version_space(pool, [], RandomSource(4, "s"))
        b = select_random(pool, RandomSource(4, "s"))
        assert np.array_equal(a.diff, b.diff)


class TestSelectBald:
    def test_degenerate_posterior_ties_to_index_zero(self):
        # All-zero covariance and mean: every candidate scores 0.
        post = ArdPosterior(np.zeros(2), np.zeros((2, 2)), np.ones(2), 1.0)
        pool = pool_from_diffs([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
        mu = pool.diffs @ post.mean
        sigma2 = np.einsum("ij,jk,ik->i", pool.diffs, post.covariance, pool.diffs)
        assert np.all(mu == 0) and np.all(sigma2 == 0)
        scores = [bald_score(m, s) for m, s in zip(mu, sigma2)]
        assert int(np.argmax(scores)) == 0

    def test_prefers_larger_variance_at_zero_mean(self):
        # Candidates (1,0) and (2,0) under mean 0, identity covariance have
        # mu=0 and sigma2 of 1 and 4; the larger variance wins.
        post_stub = ArdPosterior(np.zeros(2), np.eye(2), np.ones(2), 1.0)
        pool = pool_from_diffs([[1.0, 0.0], [2.0, 0.0]])
        mu = pool.diffs @ post_stub.mean
        sigma2 = np.einsum("ij,jk,ik->i", pool.diffs, post_stub.covariance, pool.diffs)
        scores = [bald_score(m, s) for m, s in zip(mu, sigma2)]
        assert sigma2.tolist() == [1.0, 4.0]
        assert int(np.argmax(scores)) == 1

    def test_matches_exhaustive_oracle(self):
        rng = RandomSource(18, "bald")
        space = FeatureSpace(d=3)
        diffs = rng.gen.integers(-9, 10, size=(5, 3)).astype(float)
        labels = np.where(diffs @ np.array([0.2, -0.9, 0.4]) > 0, 1, -1)
        history = history_from_diffs(diffs, labels)
        pool = sample_candidate_pool(space, 20, rng)
        chosen = select_bald(pool, history, rng)
        post = fit_ard(history)
        scores = []
        for i in range(len(pool)):
            moments = predictive(post, pool[i].diff)
            scores.append(bald_score(moments.mu, moments.sigma2))
        best = max(range(len(pool)), key=lambda i: (scores[i], -i))
        assert np.array_equal(chosen.diff, pool[best].diff)

    def test_label_negation_symmetry(self):
        # Negating every history label and every candidate difference flips
        # the sign of mu everywhere, which the score does not see.
        rng = RandomSource(19, "sym")
        diffs = rng.gen.integers(-9, 10, size=(6, 2)).astype(float)
        labels = np.where(diffs @ np.array([1.0, -1.0]) > 0, 1, -1)
        pool_diffs = rng.gen.integers(-9, 10, size=(8, 2)).astype(float)
        history = history_from_diffs(diffs, labels)
        flipped = history_from_diffs(diffs, [-y for y in labels])
        a = select_bald(pool_from_diffs(pool_diffs), history, RandomSource(0, "s"))
        b = select_bald(pool_from_diffs(-pool_diffs), flipped, RandomSource(0, "s"))
        assert np.array_equal(a.diff, -b.diff)

    def test_cold_start_reduces_to_random(self):
        pool = pool_from_diffs([[float(i)] for i in range(20)])
        a = select_bald(pool, [], RandomSource(4, "s"))
        b = select_random(pool, RandomSource(4, "s"))
        assert np.array_equal(a.diff, b.diff)


class TestSelectDispatch:
    def test_selected_is_pool_member(self):
        rng = RandomSource(20, "member")
        space = FeatureSpace(d=2)
        pool = sample_candidate_pool(space, 30, rng)
        diffs = rng.gen.integers(-9, 10, size=(4, 2)).astype(float)
        labels = np.where(diffs[:, 0] > 0, 1, -1)
        history = history_from_diffs(diffs, labels)
        members = {pool.diffs[i].tobytes() for i in range(len(pool))}
        for kind in ("random", "version-space", "bayes"):
            chosen = select(SamplerKind(kind, 30), pool, history, RandomSource(0, "s"))
            assert chosen.diff.tobytes() in members
