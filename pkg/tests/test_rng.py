"""Counter-based random streams: determinism, order independence, statistics."""

import numpy as np
import pytest

from mwheterodyne.rng import bernoulli_outcomes, poisson_counts, shot_uniforms


class TestUniforms:
    def test_deterministic(self):
        a = shot_uniforms(42, np.arange(1000))
        b = shot_uniforms(42, np.arange(1000))
        assert np.array_equal(a, b)

    def test_order_independent(self):
        idx = np.arange(1000)
        perm = np.random.default_rng(0).permutation(idx)
        full = shot_uniforms(7, idx)
        shuffled = shot_uniforms(7, perm)
        assert np.array_equal(full[perm], shuffled)

    def test_seed_and_draw_streams_differ(self):
        idx = np.arange(100)
        assert not np.array_equal(shot_uniforms(1, idx), shot_uniforms(2, idx))
        assert not np.array_equal(shot_uniforms(1, idx, draw=0),
                                  shot_uniforms(1, idx, draw=1))

    def test_range_and_mean(self):
        u = shot_uniforms(3, np.arange(100_000))
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 0.005
        assert abs(u.var() - 1.0 / 12.0) < 0.001


class TestPoisson:
    def test_moments(self):
        mean = 0.1
        counts = poisson_counts(11, np.arange(400_000),
                                np.full(400_000, mean))
        m = counts.mean()
        v = counts.var()
        assert m == pytest.approx(mean, rel=0.02)
        # Poisson law: variance/mean = 1
        assert v / m == pytest.approx(1.0, rel=0.02)

    def test_per_shot_means(self):
        means = np.array([0.0, 5.0])
        counts = poisson_counts(1, np.array([0, 1]), means)
        assert counts[0] == 0

    def test_negative_mean_rejected(self):
        with pytest.raises(ValueError):
            poisson_counts(1, np.array([0]), np.array([-0.1]))

    def test_large_mean_distribution(self):
        counts = poisson_counts(5, np.arange(100_000), np.full(100_000, 20.0))
        assert counts.mean() == pytest.approx(20.0, rel=0.01)
        assert counts.var() == pytest.approx(20.0, rel=0.05)


class TestBernoulli:
    def test_probability(self):
        p = 0.25
        out = bernoulli_outcomes(9, np.arange(200_000), np.full(200_000, p))
        assert set(np.unique(out)) <= {0, 1}
        assert out.mean() == pytest.approx(p, abs=0.005)

    def test_extremes(self):
        idx = np.arange(100)
        assert bernoulli_outcomes(1, idx, np.zeros(100)).sum() == 0
        assert bernoulli_outcomes(1, idx, np.ones(100)).sum() == 100
