"""Multiplier construction, replicate routes, and the calibrated intervals."""

import math

import numpy as np
import pytest

import gbvar
from gbvar.bootstrap import delta_loadings, replicate_estimate


def fitted_panel(n=400, d=4, seed=202, lam=1e-4, b_d=0.06):
    params = gbvar.dgp_preset("dgp1", d=d)
    panel = gbvar.simulate(params, gbvar.SimConfig(n=n, seed=seed))
    cov = gbvar.sample_moments(panel)
    fit = gbvar.post_select_fit(cov, lam=lam, b_d=b_d)
    return panel, cov, fit


class TestKernels:
    def test_gaussian_values(self):
        assert gbvar.GAUSSIAN(np.array(0.0)) == 1.0
        assert gbvar.GAUSSIAN(np.array(1.0)) == pytest.approx(math.exp(-0.5))

    def test_gaussian_passes_checks(self):
        gbvar.check_kernel(gbvar.GAUSSIAN)

    def test_rejects_wrong_at_zero(self):
        bad = gbvar.Kernel("halfheight", lambda x: 0.5 * np.exp(-0.5 * x * x))
        with pytest.raises(gbvar.UserInputError):
            gbvar.check_kernel(bad)

    def test_rejects_increasing(self):
        bad = gbvar.Kernel("valley", lambda x: 1.0 - np.exp(-np.abs(x)))
        with pytest.raises(gbvar.UserInputError):
            gbvar.check_kernel(bad)

    def test_rejects_odd_part(self):
        bad = gbvar.Kernel("skewed",
                           lambda x: np.exp(-0.5 * (np.asarray(x) - 0.1) ** 2)
                           * np.exp(-0.005))
        with pytest.raises(gbvar.UserInputError):
            gbvar.check_kernel(bad)

    def test_resolve_by_name(self):
        assert gbvar.resolve_kernel("gaussian") is gbvar.GAUSSIAN
        with pytest.raises(gbvar.UserInputError):
            gbvar.resolve_kernel("triweight")

    def test_default_bandwidth(self):
        assert gbvar.default_bandwidth(8) == pytest.approx(2.0)
        assert gbvar.default_bandwidth(1500) == pytest.approx(1500 ** (1 / 3))


class TestConfig:
    def test_invalid_level(self):
        for alpha in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(gbvar.InvalidLevel):
                gbvar.BootstrapConfig(B=10, alpha=alpha, h_n=2.0)

    def test_other_guards(self):
        with pytest.raises(gbvar.UserInputError):
            gbvar.BootstrapConfig(B=0, alpha=0.05, h_n=2.0)
        with pytest.raises(gbvar.UserInputError):
            gbvar.BootstrapConfig(B=10, alpha=0.05, h_n=0.0)


class TestToeplitzFactor:
    def test_factor_reproduces_matrix(self):
        m, h = 40, 3.0
        L, delta = gbvar.toeplitz_cholesky(m, h)
        lags = np.abs(np.subtract.outer(np.arange(m), np.arange(m)))
        T = gbvar.GAUSSIAN(lags / h)
        assert np.abs(L @ L.T - T).max() < 1e-8
        assert delta <= 1e-12

    def test_not_psd_raises(self):
        # constant negative off-diagonal: one eigenvalue is far below 0
        bad = gbvar.Kernel("negflat",
                           lambda x: np.where(np.asarray(x) == 0.0, 1.0, -0.6))
        with pytest.raises(gbvar.CovarianceNotPSD):
            gbvar.toeplitz_cholesky(6, 1.0, bad)

    def test_multiplier_moments(self):
        # e has unit variances and lag-k correlation K(k / h)
        m, h, reps = 64, 2.0, 4000
        L, _ = gbvar.toeplitz_cholesky(m, h)
        rng = np.random.default_rng(40)
        draws = np.stack([gbvar.correlated_normals(m, h, gbvar.GAUSSIAN, rng,
                                                   chol=L)
                          for _ in range(reps)])
        var = draws.var(axis=0).mean()
        assert abs(var - 1.0) < 0.05
        lag1 = np.mean(draws[:, 1:] * draws[:, :-1])
        assert abs(lag1 - math.exp(-0.5 / h ** 2)) < 0.03

    def test_tiny_bandwidth_decorrelates(self):
        m, reps = 64, 4000
        L, _ = gbvar.toeplitz_cholesky(m, 1e-3)
        rng = np.random.default_rng(41)
        draws = np.stack([L @ rng.standard_normal(m) for _ in range(reps)])
        lag1 = np.mean(draws[:, 1:] * draws[:, :-1])
        assert abs(lag1) < 0.05


class TestResiduals:
    def test_two_point_hand_value(self):
        panel = gbvar.BinaryPanel(np.array([[0], [1]], dtype=np.uint8))
        resid = gbvar.second_order_residuals(panel, np.array([[0.0]]))
        assert len(resid) == 1
        # centered values -1/2, +1/2; r_0 = +1/2, c_0 = -1/2
        assert resid[0][0, 0] == pytest.approx(-0.25, abs=1e-15)

    def test_unit_negative_estimate_annihilates(self):
        panel = gbvar.BinaryPanel(np.array([[0], [1]], dtype=np.uint8))
        resid = gbvar.second_order_residuals(panel, np.array([[-1.0]]))
        assert resid[0][0, 0] == pytest.approx(0.0, abs=1e-15)

    def test_weighted_sum_matches_outer_products(self):
        panel, cov, fit = fitted_panel(n=60)
        resid = gbvar.second_order_residuals(panel, fit.estimate)
        e = np.random.default_rng(42).standard_normal(len(resid))
        direct = sum(e[t] * resid[t] for t in range(len(resid)))
        assert np.abs(resid.weighted_sum(e) - direct).max() < 1e-12

    def test_shape_guards(self):
        panel = gbvar.BinaryPanel(np.array([[0, 1]], dtype=np.uint8))
        with pytest.raises(gbvar.PanelTooShort):
            gbvar.second_order_residuals(panel, np.zeros((2, 2)))
        tall = gbvar.BinaryPanel(np.zeros((5, 2), dtype=np.uint8))
        with pytest.raises(gbvar.ShapeMismatch):
            gbvar.second_order_residuals(tall, np.zeros((3, 3)))


class TestCriticalIndex:
    def test_hand_values(self):
        assert gbvar.critical_index(4, 0.25) == 3
        assert gbvar.critical_index(100, 0.05) == 95
        assert gbvar.critical_index(1000, 0.05) == 950
        assert gbvar.critical_index(1, 0.5) == 1

    def test_clamped(self):
        assert gbvar.critical_index(5, 0.999) == 1
        assert gbvar.critical_index(5, 1e-9) == 5

    def test_definition(self):
        # smallest s with s/B >= 1 - alpha
        for B in (3, 7, 50, 201):
            for alpha in (0.01, 0.05, 0.1, 0.37, 0.5):
                k = gbvar.critical_index(B, alpha)
                assert k / B >= 1 - alpha - 1e-12
                assert (k - 1) / B < 1 - alpha


class TestBootstrapRun:
    def test_deterministic_and_sorted(self):
        panel, cov, fit = fitted_panel()
        cfg = gbvar.BootstrapConfig(B=64, alpha=0.1, h_n=2.0, seed=9)
        r1 = gbvar.bootstrap_run(panel, fit, cov, cfg)
        r2 = gbvar.bootstrap_run(panel, fit, cov, cfg)
        assert np.array_equal(r1.psi_stars, r2.psi_stars)
        assert np.all(np.diff(r1.psi_stars) >= 0)
        assert r1.jitter == 0.0

    def test_critical_value_is_order_statistic(self):
        panel, cov, fit = fitted_panel()
        cfg = gbvar.BootstrapConfig(B=40, alpha=0.2, h_n=2.0, seed=10)
        res = gbvar.bootstrap_run(panel, fit, cov, cfg)
        k = gbvar.critical_index(40, 0.2)
        assert res.critical_value == res.psi_stars[k - 1]
        assert res.ci_halfwidth == pytest.approx(
            res.critical_value / math.sqrt(cov.n), abs=1e-15)

    def test_single_replicate(self):
        panel, cov, fit = fitted_panel()
        cfg = gbvar.BootstrapConfig(B=1, alpha=0.05, h_n=2.0, seed=11)
        res = gbvar.bootstrap_run(panel, fit, cov, cfg)
        assert res.B == 1
        assert res.critical_value == res.psi_stars[0]

    def test_seed_moves_replicates(self):
        panel, cov, fit = fitted_panel()
        a = gbvar.bootstrap_run(panel, fit, cov,
                                gbvar.BootstrapConfig(B=16, alpha=0.1,
                                                      h_n=2.0, seed=1))
        b = gbvar.bootstrap_run(panel, fit, cov,
                                gbvar.BootstrapConfig(B=16, alpha=0.1,
                                                      h_n=2.0, seed=2))
        assert not np.array_equal(a.psi_stars, b.psi_stars)

    def test_batching_invariant(self, monkeypatch):
        # replicate b depends only on (seed, b), not on the batch layout
        panel, cov, fit = fitted_panel()
        cfg = gbvar.BootstrapConfig(B=48, alpha=0.1, h_n=2.0, seed=12)
        full = gbvar.bootstrap_run(panel, fit, cov, cfg)
        monkeypatch.setattr(gbvar.bootstrap, "REPLICATE_BATCH", 7)
        chunked = gbvar.bootstrap_run(panel, fit, cov, cfg)
        assert np.allclose(full.psi_stars, chunked.psi_stars, atol=1e-12)

    def test_annihilating_estimate_gives_zero(self):
        # alternating panel with estimate -1: residuals vanish identically
        X = np.array([[t % 2] for t in range(50)], dtype=np.uint8)
        panel = gbvar.BinaryPanel(X)
        cov = gbvar.sample_moments(panel)
        fit = gbvar.PostSelectionFit(
            lasso_matrix=np.array([[-1.0]]), supports=((0,),),
            estimate=np.array([[-1.0]]), threshold=0.0,
            config=gbvar.LassoConfig(lam=0.0), converged=True)
        cfg = gbvar.BootstrapConfig(B=12, alpha=0.1, h_n=2.0, seed=13)
        res = gbvar.bootstrap_run(panel, fit, cov, cfg)
        assert np.abs(res.psi_stars).max() < 1e-12
        assert res.critical_value == pytest.approx(0.0, abs=1e-12)

    def test_eval_counter_counts_replicates(self):
        panel, cov, fit = fitted_panel()
        before = gbvar.ESTIMATOR_EVALS.value
        gbvar.bootstrap_run(panel, fit, cov,
                            gbvar.BootstrapConfig(B=17, alpha=0.1, h_n=2.0))
        assert gbvar.ESTIMATOR_EVALS.value == before + 17

    def test_moment_mismatch_rejected(self):
        panel, cov, fit = fitted_panel()
        short = gbvar.BinaryPanel(panel.data[:-5])
        cfg = gbvar.BootstrapConfig(B=4, alpha=0.1, h_n=2.0)
        with pytest.raises(gbvar.ShapeMismatch):
            gbvar.bootstrap_run(short, fit, cov, cfg)


class TestReplicateRoutes:
    def test_literal_matches_loadings(self):
        panel, cov, fit = fitted_panel()
        resid = gbvar.second_order_residuals(panel, fit.estimate)
        V, entries = delta_loadings(resid, fit, cov)
        base = gbvar.refit_rows(cov.sigma1, cov.sigma0, fit.supports)
        rng = np.random.default_rng(77)
        for _ in range(5):
            e = gbvar.correlated_normals(len(resid), 2.0, gbvar.GAUSSIAN, rng)
            star = replicate_estimate(fit, cov, resid, e)
            lin = V.T @ e / cov.n
            for a, (i, j) in enumerate(entries):
                assert star[i, j] - base[i, j] == pytest.approx(lin[a],
                                                                abs=1e-12)
            # off-support entries never move
            sel = np.zeros(star.shape, dtype=bool)
            for i, S in enumerate(fit.supports):
                sel[i, list(S)] = True
            assert np.all(star[~sel] == 0.0)

    def test_conditional_mean_is_zero(self):
        # E*[V^T e] = 0: the replicate average shrinks like 1/sqrt(B)
        panel, cov, fit = fitted_panel()
        resid = gbvar.second_order_residuals(panel, fit.estimate)
        V, _ = delta_loadings(resid, fit, cov)
        m = len(resid)
        L, _ = gbvar.toeplitz_cholesky(m, 2.0)
        rng = np.random.default_rng(78)
        B = 6000
        E = L @ rng.standard_normal((m, B))
        deltas = V.T @ E / math.sqrt(cov.n)
        sd = deltas.std(axis=1)
        assert np.all(np.abs(deltas.mean(axis=1)) <= 4 * sd / math.sqrt(B))


class TestConditionalCovariance:
    def test_matches_monte_carlo(self):
        panel, cov, fit = fitted_panel(n=200, d=3, seed=301, b_d=0.05)
        resid = gbvar.second_order_residuals(panel, fit.estimate)
        V, _ = delta_loadings(resid, fit, cov)
        h = 2.0
        C = gbvar.conditional_covariance(V, cov.n, h)
        m = len(resid)
        L, _ = gbvar.toeplitz_cholesky(m, h)
        rng = np.random.default_rng(79)
        E = L @ rng.standard_normal((m, 40_000))
        deltas = V.T @ E / math.sqrt(cov.n)
        C_mc = np.cov(deltas, bias=True)
        scale = max(np.abs(C).max(), 1e-12)
        assert np.abs(C - C_mc).max() / scale < 0.05

    def test_psd_and_symmetric(self):
        panel, cov, fit = fitted_panel(n=150, d=3, seed=302)
        resid = gbvar.second_order_residuals(panel, fit.estimate)
        V, _ = delta_loadings(resid, fit, cov)
        C = gbvar.conditional_covariance(V, cov.n, 2.5)
        assert np.array_equal(C, C.T)
        assert np.linalg.eigvalsh(C).min() > -1e-10


class TestInferenceOutputs:
    def test_simultaneous_ci_geometry(self):
        panel, cov, fit = fitted_panel()
        cfg = gbvar.BootstrapConfig(B=32, alpha=0.1, h_n=2.0, seed=14)
        res = gbvar.bootstrap_run(panel, fit, cov, cfg)
        ci = gbvar.simultaneous_ci(res, fit, cov.n)
        hw = res.critical_value / math.sqrt(cov.n)
        assert ci["halfwidth"] == pytest.approx(hw, abs=1e-15)
        assert np.allclose(ci["upper"] - fit.estimate, hw, atol=1e-15)
        assert np.allclose(fit.estimate - ci["lower"], hw, atol=1e-15)
        for i, S in enumerate(fit.supports):
            assert set(np.flatnonzero(ci["selected"][i])) == set(S)

    def test_hypothesis_test_at_truth_and_far(self):
        panel, cov, fit = fitted_panel()
        cfg = gbvar.BootstrapConfig(B=32, alpha=0.1, h_n=2.0, seed=15)
        res = gbvar.bootstrap_run(panel, fit, cov, cfg)
        at_fit = gbvar.hypothesis_test(res, fit, fit.estimate, cov.n)
        assert at_fit["statistic"] == 0.0
        assert not at_fit["reject"]
        far = gbvar.hypothesis_test(res, fit, fit.estimate + 100.0, cov.n)
        assert far["reject"]
        with pytest.raises(gbvar.ShapeMismatch):
            gbvar.hypothesis_test(res, fit, np.zeros((2, 2)), cov.n)

    def test_result_serializes(self):
        import json

        panel, cov, fit = fitted_panel()
        cfg = gbvar.BootstrapConfig(B=8, alpha=0.1, h_n=2.0, seed=16)
        res = gbvar.bootstrap_run(panel, fit, cov, cfg)
        doc = json.loads(json.dumps(gbvar.bootstrap_result_to_dict(res)))
        assert doc["B"] == 8
        assert doc["critical_value"] == pytest.approx(res.critical_value)
        assert len(doc["psi_stars"]) == 8


class TestLongrunCovariance:
    def test_iid_recovers_variance(self):
        rng = np.random.default_rng(80)
        x = rng.standard_normal(40_000)
        x -= x.mean()
        # small bandwidth: off-lag weights are negligible for iid data
        lrv = gbvar.longrun_cov_estimate(x, h_n=0.5)[0, 0]
        assert lrv == pytest.approx(1.0, abs=0.05)

    def test_zero_series(self):
        assert np.all(gbvar.longrun_cov_estimate(np.zeros(100), 3.0) == 0.0)

    def test_matrix_output_shape(self):
        rng = np.random.default_rng(81)
        X = rng.standard_normal((5000, 3))
        X -= X.mean(axis=0)
        C = gbvar.longrun_cov_estimate(X, 2.0)
        assert C.shape == (3, 3)
        assert np.array_equal(C, C.T)
