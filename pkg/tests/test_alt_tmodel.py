import numpy as np
import pytest
import scipy.stats

from robustggm.alt_tmodel import (
    McmcConfig,
    alt_cov_factor,
    alt_tlasso_fit,
    alt_weighted_scatter,
    gibbs_mh_estep,
    sample_alt_t,
)
from robustggm.errors import DegenerateProposalError, DimensionMismatchError, NonConvergenceError
from robustggm.linalg import spd_inverse
from robustggm.tlasso import TlassoConfig
from robustggm.tmodel import TParams, em_fit_mle, sample_t, weighted_scatter

from helpers import precision_for_graph


class TestCovFactor:
    def test_nu_three(self):
        assert alt_cov_factor(3.0) == pytest.approx(6.0 / np.pi, abs=1e-10)

    def test_nu_five(self):
        # 5 * Gamma(2)^2 / (2 * Gamma(2.5)^2) with Gamma(2.5) = 1.3293403881791372
        assert alt_cov_factor(5.0) == pytest.approx(1.4147106052612919, abs=1e-12)

    def test_below_standard_factor(self):
        for nu in range(3, 101):
            assert alt_cov_factor(float(nu)) <= nu / (nu - 2.0) + 1e-12


class TestSampling:
    def test_p_one_matches_standard_t(self):
        params = TParams(mu=np.array([0.5]), psi=np.array([[2.0]]), nu=3.0)
        a = sample_t(params, 100000, np.random.default_rng(1)).ravel()
        b = sample_alt_t(params, 100000, np.random.default_rng(2)).ravel()
        stat, pvalue = scipy.stats.ks_2samp(a, b)
        assert pvalue > 1e-3

    def test_variances_match_standard_factor(self):
        psi = np.array([[1.0, 0.6, 0.3], [0.6, 1.0, 0.6], [0.3, 0.6, 1.0]])
        data = sample_alt_t(TParams(mu=np.zeros(3), psi=psi, nu=5.0), 200000,
                            np.random.default_rng(3))
        cov = np.cov(data.T, bias=True)
        target = (5.0 / 3.0) * np.diag(psi)
        assert np.abs((np.diag(cov) - target) / target).max() <= 0.05

    def test_covariances_shrink_by_factor(self):
        psi = np.array([[1.0, 0.6, 0.3], [0.6, 1.0, 0.6], [0.3, 0.6, 1.0]])
        data = sample_alt_t(TParams(mu=np.zeros(3), psi=psi, nu=5.0), 200000,
                            np.random.default_rng(4))
        cov = np.cov(data.T, bias=True)
        off = ~np.eye(3, dtype=bool)
        target = alt_cov_factor(5.0) * psi[off]
        assert np.abs((cov[off] - target) / target).max() <= 0.05

    def test_seeded_determinism(self):
        params = TParams(mu=np.zeros(2), psi=np.eye(2), nu=3.0)
        a = sample_alt_t(params, 50, np.random.default_rng(5))
        b = sample_alt_t(params, 50, np.random.default_rng(5))
        assert np.array_equal(a, b)


class TestGibbsEstep:
    def test_p_one_closed_form(self):
        # at p=1 the proposal equals the full conditional: acceptance is 1
        # and the divisor mean has the closed form (nu+1)/(nu + z^2 theta)
        nu, y, theta_val = 3.0, 2.5, 1.0
        params = TParams(mu=np.array([0.0]), psi=np.array([[1.0]]), nu=nu)
        stats = gibbs_mh_estep(
            np.array([[y]]), params, np.array([[theta_val]]),
            McmcConfig(k_samples=5000, burn_in=10, seed=42),
        )
        assert np.array_equal(stats.acceptance, np.ones(1))
        closed = (nu + 1.0) / (nu + y**2 * theta_val)
        shape, rate = (nu + 1.0) / 2.0, (nu + y**2 * theta_val) / 2.0
        mc_se = np.sqrt(shape / rate**2 / 5000)
        assert abs(stats.root_outer[0, 0, 0] - closed) <= 3.0 * mc_se

    def test_diagonal_theta_decouples(self):
        rng = np.random.default_rng(6)
        nu = 3.0
        data = rng.standard_normal((3, 5)) * 1.5
        theta = np.diag([1.0, 0.5, 2.0, 1.5, 0.8])
        params = TParams(mu=np.zeros(5), psi=spd_inverse(theta), nu=nu)
        stats = gibbs_mh_estep(data, params, theta,
                               McmcConfig(k_samples=8000, burn_in=10, seed=7))
        assert np.array_equal(stats.acceptance, np.ones(5))
        closed = (nu + 1.0) / (nu + data**2 * np.diag(theta))
        rate = (nu + data**2 * np.diag(theta)) / 2.0
        mc_se = np.sqrt(((nu + 1.0) / 2.0) / rate**2 / 8000)
        assert np.all(np.abs(stats.diagonals() - closed) <= 3.5 * mc_se)

    def test_offdiagonal_theta_lowers_acceptance(self):
        rng = np.random.default_rng(8)
        theta = precision_for_graph(4, [(0, 1), (1, 2), (2, 3)], rng)
        params = TParams(mu=np.zeros(4), psi=spd_inverse(theta), nu=3.0)
        data = sample_alt_t(params, 60, rng)
        stats = gibbs_mh_estep(data, params, theta, McmcConfig(seed=9))
        assert np.all(stats.acceptance > 0.0)
        assert np.all(stats.acceptance <= 1.0)
        assert np.any(stats.acceptance < 1.0)

    def test_symmetry_and_positive_diagonals(self):
        rng = np.random.default_rng(10)
        theta = precision_for_graph(3, [(0, 1), (1, 2)], rng)
        params = TParams(mu=np.zeros(3), psi=spd_inverse(theta), nu=3.0)
        data = sample_alt_t(params, 20, rng)
        stats = gibbs_mh_estep(data, params, theta, McmcConfig(seed=11))
        for m in stats.root_outer:
            assert np.array_equal(m, m.T)
        assert np.all(stats.diagonals() > 0.0)

    def test_seeded_determinism(self):
        rng = np.random.default_rng(12)
        theta = precision_for_graph(3, [(0, 1)], rng)
        params = TParams(mu=np.zeros(3), psi=spd_inverse(theta), nu=3.0)
        data = sample_alt_t(params, 15, rng)
        cfg = McmcConfig(k_samples=40, burn_in=5, seed=13)
        a = gibbs_mh_estep(data, params, theta, cfg)
        b = gibbs_mh_estep(data, params, theta, cfg)
        assert np.array_equal(a.root_outer, b.root_outer)
        assert np.array_equal(a.acceptance, b.acceptance)

    def test_degenerate_proposal(self):
        params = TParams(mu=np.zeros(2), psi=np.eye(2), nu=3.0)
        bad_theta = np.array([[1.0, 0.0], [0.0, -0.5]])
        with pytest.raises(DegenerateProposalError):
            gibbs_mh_estep(np.zeros((2, 2)), params, bad_theta, McmcConfig(seed=0))


class TestAltWeightedScatter:
    def _stats_of(self, matrices):
        from robustggm.alt_tmodel import TauStats
        return TauStats(root_outer=np.asarray(matrices), acceptance=np.ones(1))

    def test_all_ones_gives_plain_scatter(self):
        rng = np.random.default_rng(14)
        data = rng.standard_normal((6, 3))
        mu = rng.standard_normal(3)
        stats = self._stats_of([np.ones((3, 3))] * 6)
        expected = weighted_scatter(data, mu, np.ones(6))
        assert np.allclose(alt_weighted_scatter(data, mu, stats), expected, atol=1e-12)

    def test_p_one_reduces_to_weighted_scatter(self):
        rng = np.random.default_rng(15)
        data = rng.standard_normal((5, 1))
        w = rng.uniform(0.5, 2.0, 5)
        stats = self._stats_of(w.reshape(5, 1, 1))
        expected = weighted_scatter(data, np.zeros(1), w)
        assert np.allclose(alt_weighted_scatter(data, np.zeros(1), stats), expected, atol=1e-12)

    def test_matches_draw_level_average(self):
        # oracle: explicit D(sqrt(tau)) products averaged over simulated draws
        rng = np.random.default_rng(16)
        data = rng.standard_normal((3, 2))
        mu = np.array([0.1, -0.2])
        draws = rng.gamma(2.0, 0.5, size=(400, 3, 2))
        per_draw = np.zeros((400, 2, 2))
        for k in range(400):
            for i in range(3):
                d = np.diag(np.sqrt(draws[k, i]))
                z = (data[i] - mu)[:, None]
                per_draw[k] += (d @ z @ z.T @ d) / 3
        oracle = per_draw.mean(axis=0)
        root = np.sqrt(draws)
        stats = self._stats_of(np.mean(root[..., :, None] * root[..., None, :], axis=0))
        assert np.allclose(alt_weighted_scatter(data, mu, stats), oracle, atol=1e-10)

    def test_dimension_mismatch(self):
        stats = self._stats_of(np.ones((2, 3, 3)))
        with pytest.raises(DimensionMismatchError):
            alt_weighted_scatter(np.zeros((5, 3)), np.zeros(3), stats)


class TestAltTlassoFit:
    def test_p_one_matches_standard_em(self):
        data = sample_t(TParams(mu=np.array([1.5]), psi=np.array([[2.0]]), nu=3.0),
                        400, np.random.default_rng(21))
        fit = alt_tlasso_fit(
            data,
            TlassoConfig(rho=0.0, nu=3.0, em_tol=1e-3, max_em_iter=60),
            McmcConfig(k_samples=150, burn_in=20, seed=3),
        )
        params, _, _ = em_fit_mle(data, nu=3.0)
        assert abs(fit.mu_hat[0] - params.mu[0]) <= 0.02 * max(1.0, abs(params.mu[0]))
        assert abs(fit.psi_hat[0, 0] - params.psi[0, 0]) <= 0.02 * params.psi[0, 0]

    def test_zero_iterations_is_noop(self):
        rng = np.random.default_rng(22)
        data = rng.standard_normal((30, 3))
        fit = alt_tlasso_fit(data, TlassoConfig(rho=1.0, nu=3.0, max_em_iter=0),
                             McmcConfig(seed=1))
        assert fit.em_iterations == 0
        assert not fit.converged
        assert np.array_equal(fit.weights, np.ones((30, 3)))
        assert np.array_equal(fit.mu_hat, np.median(data, axis=0))

    def test_seeded_determinism(self):
        rng = np.random.default_rng(23)
        theta = precision_for_graph(4, [(0, 1), (2, 3)], rng)
        data = sample_alt_t(TParams(mu=np.zeros(4), psi=spd_inverse(theta), nu=3.0), 80, rng)
        kwargs = dict(
            config=TlassoConfig(rho=0.05 * 80, nu=3.0, em_tol=1e-3, max_em_iter=25),
            mcmc=McmcConfig(k_samples=30, burn_in=10, seed=99),
        )
        def run():
            try:
                return alt_tlasso_fit(data, **kwargs)
            except NonConvergenceError as exc:
                return exc.result
        a, b = run(), run()
        assert np.array_equal(a.theta_hat, b.theta_hat)
        assert np.array_equal(a.weights, b.weights)

    def test_edge_agreement_with_tlasso_on_clean_data(self):
        # statistical guard, logged not failed: without contamination the
        # two fits should mostly agree on the recovered edges
        from robustggm.tlasso import tlasso_fit

        agreements = []
        for rep in range(10):
            rng = np.random.default_rng(np.random.SeedSequence([88, rep]))
            theta = precision_for_graph(10, [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)], rng)
            psi = spd_inverse(theta)
            data = rng.standard_normal((300, 10)) @ np.linalg.cholesky(psi).T
            cfg = TlassoConfig(rho=0.1 * 300, nu=3.0, em_tol=1e-3, max_em_iter=15)
            try:
                alt = alt_tlasso_fit(data, cfg, McmcConfig(k_samples=40, burn_in=15, seed=rep))
            except NonConvergenceError as exc:
                alt = exc.result
            std = tlasso_fit(data, cfg)
            from robustggm.simbench import edges_from_theta

            a = edges_from_theta(alt.theta_hat).edges
            b = edges_from_theta(std.theta_hat).edges
            union = a | b
            agreements.append(len(a & b) / len(union) if union else 1.0)
        mean_agreement = float(np.mean(agreements))
        if mean_agreement < 0.8:
            print(f"alt/tlasso edge agreement only {mean_agreement:.0%} on clean data")
        assert mean_agreement >= 0.5

    def test_block_contamination_depresses_cells_not_rows(self):
        # blocks of observations each contaminate their own single node, so
        # every row is dirty somewhere; per-cell weights must drop at the
        # contaminated cells while the rest of those rows stays healthy
        rng = np.random.default_rng(24)
        p, n = 10, 60
        theta = precision_for_graph(p, [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)], rng)
        psi = spd_inverse(theta)
        data = rng.standard_normal((n, p)) @ np.linalg.cholesky(psi).T
        level = 10.0 * float(np.max(np.diag(psi)))
        mask = np.zeros((n, p), dtype=bool)
        for block, node in enumerate([0, 3, 6]):
            mask[block * 20 : (block + 1) * 20, node] = True
        data[mask] = level + rng.standard_normal(int(mask.sum()))
        try:
            fit = alt_tlasso_fit(
                data,
                TlassoConfig(rho=0.1 * n, nu=3.0, em_tol=1e-3, max_em_iter=12),
                McmcConfig(k_samples=40, burn_in=15, seed=7),
            )
        except NonConvergenceError as exc:
            fit = exc.result
        weights = fit.weights
        contaminated_mean = weights[mask].mean()
        clean_mean = weights[~mask].mean()
        assert contaminated_mean < 0.5 * clean_mean
        # every row is contaminated somewhere, yet clean cells keep weight
        clean_cells_in_dirty_rows = weights[~mask]
        assert clean_cells_in_dirty_rows.mean() > 0.5
