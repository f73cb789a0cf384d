import numpy as np
import pytest

from hitlbo import (NumericalError, PriorSpec, kernel_eval, matern52,
                    posterior, prior_from_wire, prior_to_wire,
                    sample_realization, squared_exponential, wiener)
from hitlbo.gp import chol_with_jitter, log_marginal_likelihood


class TestPriorSpec:
    def test_validation(self):
        with pytest.raises(ValueError, match="variance"):
            wiener(0.0)
        with pytest.raises(ValueError, match="lengthscale"):
            PriorSpec("se", 1.0)
        with pytest.raises(ValueError, match="no lengthscale"):
            PriorSpec("wiener", 1.0, lengthscale=2.0)
        with pytest.raises(ValueError, match="unknown kernel"):
            PriorSpec("periodic", 1.0)

    def test_wire_round_trip(self):
        for spec in (wiener(2.0, mean=0.5), squared_exponential(1.5, 8.0),
                     matern52(0.7, 3.0, mean=-1.0)):
            assert prior_from_wire(prior_to_wire(spec)) == spec


class TestKernels:
    def test_wiener_min(self):
        assert kernel_eval(wiener(1.0), 3, 5) == 3.0

    def test_wiener_origin_is_zero(self):
        for t in (0, 1, 100):
            assert kernel_eval(wiener(1.0), 0, t) == 0.0

    def test_wiener_variance_scaling(self):
        assert kernel_eval(wiener(2.0), 2, 7) == 4.0

    def test_wiener_rejects_negative_indices(self):
        with pytest.raises(ValueError, match="non-negative"):
            kernel_eval(wiener(1.0), -1, 3)

    def test_stationary_at_zero_distance(self):
        assert kernel_eval(squared_exponential(1.7, 4.0), 9, 9) == pytest.approx(1.7)
        assert kernel_eval(matern52(0.9, 4.0), 3, 3) == pytest.approx(0.9)

    def test_stationary_decay(self):
        se = squared_exponential(1.0, 2.0)
        assert kernel_eval(se, 0, 1) > kernel_eval(se, 0, 5) > 0


class TestPosterior:
    def test_prior_recovery(self):
        spec = wiener(1.5, mean=0.25)
        m, v = posterior(spec, [], [7])
        assert m[0] == 0.25
        assert v[0] == pytest.approx(kernel_eval(spec, 7, 7))

    def test_noise_free_interpolation(self):
        m, v = posterior(wiener(1.0), [(5, 2.5)], [5])
        assert m[0] == pytest.approx(2.5, abs=1e-9)
        assert v[0] == pytest.approx(0.0, abs=1e-9)

    def test_two_point_hand_solve(self):
        # Gram [[2, 2], [2, 8]], y = (0.5, -1.0); solved by hand:
        # alpha = (1/2, -1/4), k* = (2, 4) -> mean 0; var = 4 - 8/3 = 4/3
        m, v = posterior(wiener(1.0), [(2, 0.5), (8, -1.0)], [4])
        assert m[0] == pytest.approx(0.0, abs=1e-8)
        assert v[0] == pytest.approx(4.0 / 3.0, abs=1e-7)

    def test_nonzero_mean_conditioning(self):
        spec = wiener(1.0, mean=3.0)
        m, _ = posterior(spec, [(4, 3.0)], [100])
        # observation equal to the mean leaves the posterior mean flat
        assert m[0] == pytest.approx(3.0, abs=1e-9)

    def test_duplicate_points_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            posterior(wiener(1.0), [(3, 1.0), (3, 2.0)], [5])

    def test_variance_never_negative_and_non_increasing(self):
        rng = np.random.default_rng(7)
        for trial in range(20):
            spec = wiener(float(rng.uniform(0.5, 4.0)))
            pts = sorted(rng.choice(np.arange(1, 200), size=6, replace=False).tolist())
            vals = [float(v) for v in rng.normal(size=6)]
            queries = rng.choice(np.arange(1, 200), size=16, replace=False).tolist()
            prev = None
            for k in range(len(pts) + 1):
                _, var = posterior(spec, list(zip(pts[:k], vals[:k])), queries)
                assert (var >= 0).all()
                if prev is not None:
                    assert (var <= prev + 1e-8).all()
                prev = var


class TestJitterLadder:
    def test_singular_psd_recovers(self):
        gram = np.ones((3, 3))  # rank one, PSD
        L = chol_with_jitter(gram)
        assert np.allclose(L @ L.T, gram, atol=1e-5)

    def test_indefinite_matrix_fails(self):
        bad = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3, -1
        with pytest.raises(NumericalError, match="jitter"):
            chol_with_jitter(bad)

    def test_wiener_gram_over_distinct_points_factorizes(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            pts = np.sort(rng.choice(np.arange(1, 5000), size=30, replace=False))
            gram = np.minimum.outer(pts, pts).astype(float)
            chol_with_jitter(gram)


class TestRealizations:
    def test_origin_pinned(self):
        vals = sample_realization(wiener(1.0), [0], seed=99)
        assert vals[0] == 0.0

    def test_deterministic(self):
        a = sample_realization(wiener(2.0), [1, 5, 9], seed=4)
        b = sample_realization(wiener(2.0), [1, 5, 9], seed=4)
        assert np.array_equal(a, b)

    def test_points_must_ascend(self):
        with pytest.raises(ValueError, match="ascending"):
            sample_realization(wiener(1.0), [3, 3, 5], seed=0)

    def test_stationary_realization_runs(self):
        vals = sample_realization(squared_exponential(1.0, 3.0), list(range(10)), seed=1)
        assert vals.shape == (10,)

    def test_marginal_statistics(self):
        # mean -> spec.mean and var at t -> kernel(t, t), within 3 standard errors
        spec = wiener(1.0, mean=2.0)
        t = 25
        n = 10_000
        draws = np.array([sample_realization(spec, [t], seed=s)[0] for s in range(n)])
        se_mean = np.sqrt(25.0 / n)
        assert abs(draws.mean() - 2.0) <= 3 * se_mean
        var = draws.var(ddof=1)
        se_var = 25.0 * np.sqrt(2.0 / n)
        assert abs(var - 25.0) <= 3 * se_var


def test_log_likelihood_prefers_true_variance():
    pts = list(range(1, 33))
    w = sample_realization(wiener(4.0), pts, seed=11)
    obs = list(zip(pts, w))
    ll_true = log_marginal_likelihood(wiener(4.0), obs)
    assert ll_true > log_marginal_likelihood(wiener(0.04), obs)
    assert ll_true > log_marginal_likelihood(wiener(400.0), obs)
