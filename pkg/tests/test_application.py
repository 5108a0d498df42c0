"""End-to-end pipeline on the checked-in portfolio-style fixture.

The fixture is synthetic (geometric walks with a shared factor), committed
so the ingest -> moments -> least-squares -> diagnostics chain is locked
at bit level. The frozen numbers below were recorded when the fixture was
created; any drift in centering, divisors, or binarization rules breaks
them.
"""

import pathlib

import numpy as np
import pytest

import gbvar

FIXTURE = pathlib.Path(__file__).parent / "data" / "portfolio_levels.csv"

MAX_ROWSUM = 0.5467828771291934
SPECTRAL_RADIUS = 0.37689287455849063
A_FIRST_ROW_HEAD = (-0.004369650516730405, 0.0587107702885967,
                    0.1202671580882018)


@pytest.fixture(scope="module")
def panel():
    labels, values = gbvar.read_numeric_csv(FIXTURE)
    data = gbvar.binarize_advance_decline(values)
    return gbvar.BinaryPanel(data, labels=labels)


class TestPipeline:
    def test_panel_shape(self, panel):
        assert (panel.n, panel.d) == (300, 8)
        assert panel.labels[0] == "asset1"

    def test_frozen_least_squares_values(self, panel):
        A = gbvar.yule_walker_ols(gbvar.sample_moments(panel))
        rep = gbvar.stationarity_diagnostics(A)
        assert rep.max_rowsum == pytest.approx(MAX_ROWSUM, abs=1e-12)
        assert rep.spectral_radius == pytest.approx(SPECTRAL_RADIUS, abs=1e-12)
        assert rep.is_stationary
        for j, want in enumerate(A_FIRST_ROW_HEAD):
            assert A[0, j] == pytest.approx(want, abs=1e-12)

    def test_sparse_fit_runs(self, panel):
        cov = gbvar.sample_moments(panel)
        fit = gbvar.post_select_fit(cov, lam=1e-4, b_d=0.1)
        assert fit.estimate.shape == (8, 8)
        assert fit.converged
        # thresholding at 0.1 on weakly dependent data prunes heavily
        assert sum(len(S) for S in fit.supports) < 32

    def test_bootstrap_interval_positive(self, panel):
        cov = gbvar.sample_moments(panel)
        fit = gbvar.post_select_fit(cov, lam=1e-4, b_d=0.05)
        cfg = gbvar.BootstrapConfig(B=64, alpha=0.1,
                                    h_n=gbvar.default_bandwidth(panel.n),
                                    seed=5)
        res = gbvar.bootstrap_run(panel, fit, cov, cfg)
        assert res.critical_value > 0
        ci = gbvar.simultaneous_ci(res, fit, panel.n)
        assert ci["halfwidth"] > 0
        assert np.all(ci["upper"] >= ci["lower"])

    def test_tune_on_fixture(self, panel):
        grid = gbvar.TuneGrid(lambda_grid=[1e-5, 1e-3],
                              bd_grid=[0.02, 0.08])
        res = gbvar.tune(panel, grid)
        assert res.lam in (1e-5, 1e-3)
        assert res.bd in (0.02, 0.08)
        assert np.isfinite(res.score)
