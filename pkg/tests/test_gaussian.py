import math

import numpy as np
import pytest

from icatcma.errors import RunAborted
from icatcma.gaussian import (
    GaussianModel,
    Hyperparameters,
    default_hyperparameters,
    expected_chi_norm,
)


class TestDefaultHyperparameters:
    def test_population_sizes(self):
        assert default_hyperparameters(5).lam == 8
        assert default_hyperparameters(30).lam == 14

    def test_mu_is_half(self):
        assert default_hyperparameters(5).mu == 4
        assert default_hyperparameters(30).mu == 7

    def test_weights_lambda8(self):
        hyper = default_hyperparameters(5)
        expected = [0.5299, 0.2857, 0.1429, 0.0415, 0.0, 0.0, 0.0, 0.0]
        assert hyper.weights == pytest.approx(expected, abs=1e-4)

    def test_weight_invariants(self):
        for n in (1, 2, 5, 10, 30, 50):
            hyper = default_hyperparameters(n)
            assert hyper.weights.sum() == pytest.approx(1.0)
            assert np.all(np.diff(hyper.weights) <= 1e-15)
            assert np.all(hyper.weights >= 0.0)
            assert hyper.d_sigma >= 1.0
            for rate in (hyper.c_m, hyper.c_sigma, hyper.c_c, hyper.c_1, hyper.c_mu):
                assert 0.0 <= rate <= 1.0

    def test_rejects_zero_dimension(self):
        with pytest.raises(ValueError):
            default_hyperparameters(0)

    def test_rejects_degenerate_population(self):
        with pytest.raises(ValueError):
            default_hyperparameters(5, population_size=1)


class TestExpectedChiNorm:
    def test_n1_close_to_exact(self):
        assert abs(expected_chi_norm(1) - math.sqrt(2.0 / math.pi)) < 5e-3

    def test_n5_value_and_monte_carlo(self):
        assert expected_chi_norm(5) == pytest.approx(2.12853, abs=1e-5)
        rng = np.random.default_rng(0)
        sampled = np.linalg.norm(rng.standard_normal((10**6, 5)), axis=1).mean()
        assert abs(expected_chi_norm(5) - sampled) < 1e-2

    def test_monotone(self):
        values = [expected_chi_norm(n) for n in range(1, 101)]
        assert np.all(np.diff(values) > 0.0)


def small_hyper(lam, weights, **overrides):
    params = dict(
        lam=lam,
        weights=np.asarray(weights, dtype=float),
        mu_eff=1.0 / float(np.sum(np.asarray(weights) ** 2)),
        c_m=1.0,
        c_sigma=0.3,
        d_sigma=1.3,
        c_c=0.4,
        c_1=0.1,
        c_mu=0.2,
    )
    params.update(overrides)
    return Hyperparameters(**params)


class TestSamplePopulation:
    def test_sigma_to_zero_limit(self):
        mu = np.array([1.0, -2.0])
        model = GaussianModel(mu, sigma=1e-200)
        xs = model.sample_population(16, np.random.default_rng(0))
        assert np.max(np.abs(xs - mu)) < 1e-190

    def test_identity_monte_carlo(self):
        model = GaussianModel(np.zeros(2), sigma=1.0)
        xs = model.sample_population(10**5, np.random.default_rng(1))
        assert np.all(np.abs(xs.var(axis=0) - 1.0) < 0.02)

    def test_diagonal_covariance(self):
        model = GaussianModel(np.zeros(2), sigma=1.0, cov=np.diag([4.0, 1.0]))
        xs = model.sample_population(10**5, np.random.default_rng(2))
        cov = np.cov(xs.T)
        assert abs(cov[0, 0] - 4.0) < 0.12 and abs(cov[1, 1] - 1.0) < 0.03
        assert abs(cov[0, 1]) < 0.05

    def test_nonfinite_covariance_aborts(self):
        model = GaussianModel(np.zeros(2), sigma=1.0)
        model.C = np.array([[np.nan, 0.0], [0.0, 1.0]])
        with pytest.raises(RunAborted):
            model._decompose()


class TestUpdateMean:
    def test_identical_candidates(self):
        model = GaussianModel(np.array([1.0, 2.0]), sigma=0.5)
        hyper = small_hyper(2, [0.7, 0.3])
        xs = np.tile(model.mu, (2, 1))
        assert model.update_mean(xs, hyper) == pytest.approx(model.mu)

    def test_single_weight_endpoint(self):
        model = GaussianModel(np.zeros(2), sigma=1.0)
        hyper = small_hyper(2, [1.0, 0.0])
        xs = np.array([[3.0, -1.0], [100.0, 100.0]])
        assert model.update_mean(xs, hyper) == pytest.approx([3.0, -1.0])

    def test_hand_example(self):
        model = GaussianModel(np.zeros(1), sigma=1.0)
        hyper = small_hyper(2, [0.7, 0.3])
        assert model.update_mean(np.array([[1.0], [-1.0]]), hyper) == pytest.approx([0.4])


class TestEvolutionPaths:
    def test_pure_decay(self):
        model = GaussianModel(np.zeros(3), sigma=1.0)
        model.p_sigma = np.array([1.0, 0.0, -1.0])
        model.p_c = np.array([0.5, 0.5, 0.5])
        hyper = small_hyper(2, [0.6, 0.4])
        p_sigma, p_c, _ = model.update_evolution_paths(model.mu.copy(), hyper)
        assert p_sigma == pytest.approx((1 - hyper.c_sigma) * model.p_sigma)
        assert p_c == pytest.approx((1 - hyper.c_c) * model.p_c)

    def test_full_replacement(self):
        model = GaussianModel(np.zeros(2), sigma=1.0)
        hyper = small_hyper(2, [0.6, 0.4], c_sigma=1.0)
        mu_new = np.array([0.3, -0.2])
        p_sigma, _, _ = model.update_evolution_paths(mu_new, hyper)
        expected = mu_new / (hyper.c_m * math.sqrt(np.sum(hyper.weights**2)))
        assert p_sigma == pytest.approx(expected)

    def test_stall_clause(self):
        model = GaussianModel(np.zeros(2), sigma=1.0)
        model.p_c = np.array([1.0, 1.0])
        hyper = small_hyper(2, [0.6, 0.4])
        # enormous mean shift makes the new p_sigma far longer than E||N||
        mu_new = np.array([100.0, 100.0])
        p_sigma, p_c, h_sigma = model.update_evolution_paths(mu_new, hyper)
        assert np.linalg.norm(p_sigma) > 10 * expected_chi_norm(2)
        assert h_sigma == 0.0
        assert p_c == pytest.approx((1 - hyper.c_c) * model.p_c)


class TestStepSize:
    def test_neutral_length(self):
        model = GaussianModel(np.zeros(3), sigma=0.7)
        hyper = small_hyper(2, [0.6, 0.4])
        p = np.zeros(3)
        p[0] = expected_chi_norm(3)
        assert model.update_step_size(p, hyper) == pytest.approx(0.7)

    def test_zero_path_shrinks(self):
        model = GaussianModel(np.zeros(3), sigma=0.7)
        hyper = small_hyper(2, [0.6, 0.4])
        expected = 0.7 * math.exp(-hyper.c_sigma / hyper.d_sigma)
        assert model.update_step_size(np.zeros(3), hyper) == pytest.approx(expected)

    def test_double_length_grows(self):
        model = GaussianModel(np.zeros(3), sigma=0.7)
        hyper = small_hyper(2, [0.6, 0.4])
        p = np.zeros(3)
        p[1] = 2.0 * expected_chi_norm(3)
        expected = 0.7 * math.exp(hyper.c_sigma / hyper.d_sigma)
        assert model.update_step_size(p, hyper) == pytest.approx(expected)


class TestCovariance:
    def test_zero_rates_keep_c(self):
        model = GaussianModel(np.zeros(2), sigma=1.0, cov=np.array([[2.0, 0.3], [0.3, 1.0]]))
        hyper = small_hyper(2, [0.6, 0.4], c_1=0.0, c_mu=0.0)
        xs = np.array([[1.0, 1.0], [-1.0, 0.5]])
        c_new = model.update_covariance(xs, np.ones(2), 1.0, hyper)
        assert c_new == pytest.approx(model.C)

    def test_full_rank_mu_replacement(self):
        model = GaussianModel(np.zeros(2), sigma=2.0)
        hyper = small_hyper(2, [1.0, 0.0], c_1=0.0, c_mu=1.0)
        x = np.array([2.0, -4.0])
        c_new = model.update_covariance(np.stack([x, x]), np.zeros(2), 1.0, hyper)
        y = x / 2.0
        assert c_new == pytest.approx(np.outer(y, y))

    def test_rank_one_trace_identity(self):
        cov = np.array([[1.5, 0.2], [0.2, 0.8]])
        model = GaussianModel(np.zeros(2), sigma=1.0, cov=cov)
        hyper = small_hyper(2, [0.6, 0.4], c_1=0.1, c_mu=0.0)
        p_c = np.array([0.3, -0.7])
        xs = np.zeros((2, 2))
        c_new = model.update_covariance(xs, p_c, 1.0, hyper)
        expected_trace = np.trace(cov) + hyper.c_1 * (p_c @ p_c - np.trace(cov))
        assert np.trace(c_new) == pytest.approx(expected_trace)


class TestSigmaFloor:
    def test_unchanged_above_floor(self):
        model = GaussianModel(np.zeros(2), sigma=0.1)
        model.enforce_sigma_floor()
        assert model.sigma == 0.1

    def test_raised_to_floor(self):
        model = GaussianModel(np.zeros(2), sigma=1e-20)
        model.enforce_sigma_floor()
        assert model.sigma == pytest.approx(1e-15)

    def test_floor_with_small_eigenvalue(self):
        model = GaussianModel(np.zeros(2), sigma=1e-12, cov=np.diag([1e-10, 1.0]))
        model.enforce_sigma_floor()
        assert model.sigma == pytest.approx(1e-10)
        assert model.sigma**2 * 1e-10 >= 1e-30


class TestLongRunProperties:
    def test_covariance_stays_spd_on_random_quadratic(self):
        rng = np.random.default_rng(11)
        n = 4
        a = rng.standard_normal((n, n))
        hessian = a @ a.T + n * np.eye(n)
        hyper = default_hyperparameters(n)
        model = GaussianModel(rng.standard_normal(n), sigma=0.5)
        for _ in range(10**4):
            xs = model.sample_population(hyper.lam, rng)
            values = np.einsum("ki,ij,kj->k", xs, hessian, xs)
            model.step(xs[np.argsort(values, kind="stable")], hyper)
            assert model._eigvals[0] > 0.0
            assert np.allclose(model.C, model.C.T, rtol=1e-9)
            assert model.sigma**2 * model._eigvals[0] >= 1e-30

    def test_flat_fitness_keeps_state_sane(self):
        rng = np.random.default_rng(12)
        hyper = default_hyperparameters(3)
        model = GaussianModel(np.zeros(3), sigma=1.0)
        for _ in range(10**3):
            xs = model.sample_population(hyper.lam, rng)
            model.step(xs, hyper)  # stable sort leaves sampling order
        assert np.all(np.isfinite(model.mu))
        assert 1e-30 < model.sigma < 1e30
