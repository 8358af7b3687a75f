import numpy as np
import pytest
import scipy.stats

from robustggm.errors import DimensionMismatchError
from robustggm.tmodel import (
    TParams,
    e_step_weight,
    em_fit_mle,
    sample_t,
    sufficient_stats,
    t_log_density,
    weighted_scatter,
)

from helpers import random_spd


def univariate(nu=3.0, mu=0.0, psi=1.0):
    return TParams(mu=np.array([mu]), psi=np.array([[psi]]), nu=nu)


class TestLogDensity:
    def test_univariate_at_center(self):
        # standard t3 density at 0 is 2 / (pi * sqrt(3))
        value = np.exp(t_log_density(np.array([0.0]), univariate()))
        assert value == pytest.approx(2.0 / (np.pi * np.sqrt(3.0)), rel=1e-12)

    def test_univariate_matches_scipy(self):
        params = univariate(nu=5.0, mu=1.5, psi=2.0)
        for y in (-3.0, 0.0, 1.5, 4.2):
            ours = t_log_density(np.array([y]), params)
            # scale family: psi is the squared scale
            ref = scipy.stats.t.logpdf(y, df=5.0, loc=1.5, scale=np.sqrt(2.0))
            assert ours == pytest.approx(ref, rel=1e-12)

    def test_multivariate_matches_scipy(self):
        rng = np.random.default_rng(0)
        psi = random_spd(rng, 3)
        mu = rng.standard_normal(3)
        params = TParams(mu=mu, psi=psi, nu=4.0)
        ref = scipy.stats.multivariate_t(loc=mu, shape=psi, df=4.0)
        for _ in range(5):
            y = rng.standard_normal(3)
            assert t_log_density(y, params) == pytest.approx(ref.logpdf(y), rel=1e-10)

    def test_integrates_to_one(self):
        xs = np.linspace(-50.0, 50.0, 4001)
        params = univariate(nu=3.0)
        pdf = np.exp([t_log_density(np.array([y]), params) for y in xs])
        assert np.trapezoid(pdf, xs) == pytest.approx(1.0, abs=1e-4)

    def test_translation_invariance(self):
        rng = np.random.default_rng(1)
        psi = random_spd(rng, 4)
        mu = rng.standard_normal(4)
        y = rng.standard_normal(4)
        shift = rng.standard_normal(4)
        a = t_log_density(y, TParams(mu=mu, psi=psi, nu=3.0))
        b = t_log_density(y + shift, TParams(mu=mu + shift, psi=psi, nu=3.0))
        assert a == pytest.approx(b, rel=1e-12)

    def test_maximized_at_center(self):
        rng = np.random.default_rng(2)
        psi = random_spd(rng, 3)
        mu = rng.standard_normal(3)
        params = TParams(mu=mu, psi=psi, nu=3.0)
        center = t_log_density(mu, params)
        for _ in range(20):
            assert t_log_density(mu + 0.1 * rng.standard_normal(3), params) < center

    def test_nu_validation(self):
        with pytest.raises(ValueError):
            TParams(mu=np.zeros(1), psi=np.eye(1), nu=2.5)


class TestSampling:
    def test_mean(self):
        rng = np.random.default_rng(3)
        mu = np.array([1.0, -2.0, 0.5])
        psi = np.array([[1.0, 0.6, 0.3], [0.6, 1.0, 0.6], [0.3, 0.6, 1.0]])
        data = sample_t(TParams(mu=mu, psi=psi, nu=5.0), 200000, rng)
        # V[Y_j] = (5/3) psi_jj; mean within 3 standard errors per coordinate
        se = np.sqrt((5.0 / 3.0) * np.diag(psi) / data.shape[0])
        assert np.all(np.abs(data.mean(axis=0) - mu) <= 3.0 * se)

    def test_covariance_factor(self):
        rng = np.random.default_rng(4)
        psi = np.array([[1.0, 0.6, 0.3], [0.6, 1.0, 0.6], [0.3, 0.6, 1.0]])
        data = sample_t(TParams(mu=np.zeros(3), psi=psi, nu=5.0), 200000, rng)
        cov = np.cov(data.T, bias=True)
        target = (5.0 / 3.0) * psi
        assert np.abs((cov - target) / target).max() <= 0.05

    def test_seeded_determinism(self):
        params = TParams(mu=np.zeros(2), psi=np.eye(2), nu=3.0)
        a = sample_t(params, 100, np.random.default_rng(42))
        b = sample_t(params, 100, np.random.default_rng(42))
        assert np.array_equal(a, b)


class TestEStepWeight:
    def test_at_center(self):
        params = TParams(mu=np.zeros(100), psi=np.eye(100), nu=3.0)
        assert e_step_weight(np.zeros(100), params) == pytest.approx(103.0 / 3.0)

    def test_direct_formula(self):
        # nu=3, p=2, delta=5 -> 5/8; realized by |y| = sqrt(5) on one axis
        params = TParams(mu=np.zeros(2), psi=np.eye(2), nu=3.0)
        y = np.array([np.sqrt(5.0), 0.0])
        assert e_step_weight(y, params) == pytest.approx(5.0 / 8.0)

    def test_monotone_decreasing(self):
        params = TParams(mu=np.zeros(1), psi=np.eye(1), nu=3.0)
        values = [e_step_weight(np.array([float(r)]), params) for r in range(0, 30, 3)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 0.05


class TestWeightedScatter:
    def test_unit_weights(self):
        rng = np.random.default_rng(5)
        data = rng.standard_normal((9, 3))
        mu = rng.standard_normal(3)
        centered = data - mu
        expected = centered.T @ centered / 9
        assert np.allclose(weighted_scatter(data, mu, np.ones(9)), expected, atol=1e-12)

    def test_single_observation(self):
        y = np.array([[1.0, 2.0]])
        mu = np.array([0.5, 0.5])
        out = weighted_scatter(y, mu, np.array([3.0]))
        z = (y[0] - mu)[:, None]
        assert np.allclose(out, 3.0 * (z @ z.T), atol=1e-12)

    def test_against_double_loop(self):
        rng = np.random.default_rng(6)
        data = rng.standard_normal((7, 3))
        mu = rng.standard_normal(3)
        w = rng.uniform(0.2, 2.0, 7)
        naive = np.zeros((3, 3))
        for i in range(7):
            z = data[i] - mu
            naive += w[i] * np.outer(z, z)
        naive /= 7
        assert np.allclose(weighted_scatter(data, mu, w), naive, atol=1e-12)

    def test_rejects_mismatched(self):
        with pytest.raises(DimensionMismatchError):
            weighted_scatter(np.zeros((4, 2)), np.zeros(3), np.ones(4))


class TestSufficientStats:
    def test_linear_in_weights(self):
        rng = np.random.default_rng(7)
        data = rng.standard_normal((6, 2))
        w1 = rng.uniform(0.5, 1.5, 6)
        w2 = rng.uniform(0.5, 1.5, 6)
        a, b, c = sufficient_stats(data, w1), sufficient_stats(data, w2), sufficient_stats(data, w1 + w2)
        assert c.s_tau == pytest.approx(a.s_tau + b.s_tau)
        assert np.allclose(c.s_tau_y, a.s_tau_y + b.s_tau_y)
        assert np.allclose(c.s_tau_yy, a.s_tau_yy + b.s_tau_yy)


class TestEmFit:
    def test_monte_carlo_consistency(self):
        mu = np.array([1.0, -2.0, 0.5])
        psi = np.array([[2.0, 0.8, 0.5], [0.8, 1.5, 0.6], [0.5, 0.6, 1.2]])
        data = sample_t(TParams(mu=mu, psi=psi, nu=5.0), 5000, np.random.default_rng(8))
        params, weights, trace = em_fit_mle(data, nu=5.0)
        assert np.abs(params.mu - mu).max() <= 0.05
        assert np.abs((params.psi - psi) / psi).max() <= 0.10
        assert weights.shape == (5000,) and np.all(weights > 0)

    def test_single_step_gaussian_limit(self):
        # with unit weights the update is the sample mean and (1/n) scatter
        rng = np.random.default_rng(9)
        data = rng.standard_normal((40, 3))
        stats = sufficient_stats(data, np.ones(40))
        mu = stats.s_tau_y / stats.s_tau
        assert np.allclose(mu, data.mean(axis=0), atol=1e-12)
        scatter = weighted_scatter(data, mu, np.ones(40))
        centered = data - data.mean(axis=0)
        assert np.allclose(scatter, centered.T @ centered / 40, atol=1e-12)

    def test_trace_monotone(self):
        rng = np.random.default_rng(10)
        for seed in range(20):
            psi = random_spd(np.random.default_rng(seed), 3)
            data = sample_t(
                TParams(mu=rng.standard_normal(3), psi=psi, nu=4.0),
                120,
                np.random.default_rng(100 + seed),
            )
            _, _, trace = em_fit_mle(data, nu=4.0)
            diffs = np.diff(np.asarray(trace))
            assert np.all(diffs >= -1e-9)
