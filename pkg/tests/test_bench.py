"""Benchmark harness plumbing at toy scale."""

import numpy as np
import pytest

import gbvar
from gbvar.bench import REFERENCE_HYPERPARAMS


class TestConfig:
    def test_reference_fill(self):
        cfg = gbvar.BenchConfig(dgp="dgp1", n=1500, d=80, reps=1)
        assert cfg.lam == pytest.approx(6.14e-6)
        assert cfg.bd == pytest.approx(0.131)
        assert cfg.h_n == pytest.approx(2.333)

    def test_reference_table_complete(self):
        for name, ref in REFERENCE_HYPERPARAMS.items():
            assert set(ref) == {"lam", "bd", "h_n"}
            cfg = gbvar.BenchConfig(dgp=name, n=100, d=5, reps=1)
            assert cfg.lam == ref["lam"]

    def test_overrides_win(self):
        cfg = gbvar.BenchConfig(dgp="dgp2", n=100, d=5, reps=1,
                                lam=1e-3, bd=0.2, h_n=4.0)
        assert (cfg.lam, cfg.bd, cfg.h_n) == (1e-3, 0.2, 4.0)

    def test_unknown_preset_needs_explicit_values(self):
        with pytest.raises(gbvar.UserInputError):
            gbvar.BenchConfig(dgp="example1", n=100, d=None, reps=1)
        cfg = gbvar.BenchConfig(dgp="example1", n=100, d=None, reps=1,
                                lam=1e-4, bd=0.1)
        assert cfg.h_n == pytest.approx(100 ** (1 / 3))

    def test_guards(self):
        with pytest.raises(gbvar.UserInputError):
            gbvar.BenchConfig(dgp="dgp1", n=100, d=5, reps=0)
        with pytest.raises(gbvar.UserInputError):
            gbvar.BenchConfig(dgp="dgp1", n=100, d=5, reps=1, B=-1)
        with pytest.raises(gbvar.UserInputError):
            gbvar.BenchConfig(dgp="dgp1", n=100, d=5, reps=1,
                              methods=("post", "magic"))


class TestRun:
    def test_toy_run_structure(self):
        cfg = gbvar.BenchConfig(dgp="dgp1", n=150, d=5, reps=3, B=8, seed=2)
        report = gbvar.run_bench(cfg)
        assert len(report.per_rep) == 3 * 3
        assert set(report.summary) == {"lasso", "threshold", "post"}
        post = report.summary["post"]
        assert post["coverage"] is not None
        assert 0.0 <= post["coverage"] <= 1.0
        assert post["ci_length"] > 0
        assert report.summary["lasso"]["coverage"] is None
        assert report.wall_time > 0

    def test_deterministic_across_runs(self):
        cfg = gbvar.BenchConfig(dgp="dgp1", n=120, d=4, reps=2, B=4, seed=3)
        a = gbvar.bench_report_csv(gbvar.run_bench(cfg))
        b = gbvar.bench_report_csv(gbvar.run_bench(cfg))
        assert a == b

    def test_eval_counter_totals(self):
        # each replicate burns 1 fit plus B bootstrap refits
        reps, B = 2, 5
        cfg = gbvar.BenchConfig(dgp="dgp1", n=120, d=4, reps=reps, B=B, seed=4)
        before = gbvar.ESTIMATOR_EVALS.value
        gbvar.run_bench(cfg)
        assert gbvar.ESTIMATOR_EVALS.value == before + reps * (B + 1)

    def test_skip_bootstrap_when_b_zero(self):
        cfg = gbvar.BenchConfig(dgp="dgp1", n=120, d=4, reps=2, B=0, seed=5)
        report = gbvar.run_bench(cfg)
        assert report.summary["post"]["coverage"] is None
        csv_text = gbvar.bench_report_csv(report)
        for line in csv_text.strip().split("\n")[1:]:
            assert line.endswith(",,")

    def test_post_beats_raw_lasso_on_sparse_truth(self):
        # with the reference-style threshold the refit should dominate
        cfg = gbvar.BenchConfig(dgp="dgp1", n=600, d=12, reps=3, B=0,
                                seed=6, lam=1e-5, bd=0.12)
        report = gbvar.run_bench(cfg)
        assert (report.summary["post"]["r1"]
                < report.summary["lasso"]["r1"])

    def test_methods_subset(self):
        cfg = gbvar.BenchConfig(dgp="dgp1", n=120, d=4, reps=1, B=0,
                                methods=("lasso",))
        report = gbvar.run_bench(cfg)
        assert set(report.summary) == {"lasso"}
        assert len(report.per_rep) == 1
