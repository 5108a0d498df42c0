"""Monte Carlo benchmark harness: estimation error and bootstrap coverage
over replicated panels from the named presets.

Per replicate: simulate, fit once, score three reporting methods against
the truth (raw Lasso, thresholded Lasso, post-selection refit), then run
the wild bootstrap and record whether the simultaneous region covers the
true matrix. Replicates use substreams keyed (seed, rep, purpose), so
the report is identical no matter how many worker threads ran it.
"""

import math
import time
from dataclasses import dataclass
from io import StringIO
from typing import Optional

import numpy as np

from ._util import fmt_float, parallel_map
from .bootstrap import BootstrapConfig, bootstrap_run, default_bandwidth
from .errors import UserInputError
from .estimate import metrics, post_select_fit, threshold_matrix
from .moments import sample_moments
from .simulate import SimConfig, dgp_preset, simulate

# hyperparameters used for the reference benchmark runs (tuned once via
# the train/test search at n=1500, d=80 and then frozen)
REFERENCE_HYPERPARAMS = {
    "dgp1": {"lam": 6.14e-6, "bd": 0.131, "h_n": 2.333},
    "dgp2": {"lam": 6.14e-6, "bd": 0.105, "h_n": 3.368},
    "dgp3": {"lam": 6.14e-6, "bd": 0.095, "h_n": 2.421},
}

METHODS = ("lasso", "threshold", "post")


@dataclass(frozen=True)
class BenchConfig:
    dgp: str
    n: int
    d: int
    reps: int
    B: int = 200
    alpha: float = 0.05
    seed: int = 0
    lam: Optional[float] = None
    bd: Optional[float] = None
    h_n: Optional[float] = None
    methods: tuple = METHODS

    def __post_init__(self):
        if self.reps < 1:
            raise UserInputError("reps must be at least 1")
        if self.B < 0:
            raise UserInputError("B must be nonnegative (0 skips the bootstrap)")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise UserInputError(f"unknown methods {bad}; known: {METHODS}")
        ref = REFERENCE_HYPERPARAMS.get(self.dgp.strip().lower(), {})
        if self.lam is None:
            object.__setattr__(self, "lam", ref.get("lam"))
        if self.bd is None:
            object.__setattr__(self, "bd", ref.get("bd"))
        if self.h_n is None:
            object.__setattr__(self, "h_n", ref.get("h_n", default_bandwidth(self.n)))
        if self.lam is None or self.bd is None:
            raise UserInputError(
                f"no reference hyperparameters for {self.dgp!r}; "
                "pass lam and bd explicitly")
        object.__setattr__(self, "methods", tuple(self.methods))


@dataclass(frozen=True)
class BenchReport:
    config: BenchConfig
    per_rep: tuple   # rows: {rep, method, r1, r2, kappa, coverage, length}
    summary: dict    # method -> {r1, r2, kappa, coverage, ci_length}
    wall_time: float


def _one_replicate(config: BenchConfig, truth: np.ndarray, rep: int) -> list:
    params = dgp_preset(config.dgp, config.d)
    panel = simulate(params, SimConfig(n=config.n, seed=(config.seed, rep, 0)))
    cov = sample_moments(panel)
    fit = post_select_fit(cov, config.lam, config.bd)
    estimates = {
        "lasso": fit.lasso_matrix,
        "threshold": threshold_matrix(fit.lasso_matrix, config.bd),
        "post": fit.estimate,
    }
    coverage = length = None
    if config.B >= 1 and "post" in config.methods:
        bcfg = BootstrapConfig(config.B, config.alpha, config.h_n,
                               seed=(config.seed, rep, 1))
        result = bootstrap_run(panel, fit, cov, bcfg)
        stat = math.sqrt(config.n) * np.abs(fit.estimate - truth).max()
        coverage = 1.0 if stat <= result.critical_value else 0.0
        length = 2.0 * result.critical_value / math.sqrt(config.n)
    rows = []
    for method in config.methods:
        scores = metrics(estimates[method], truth)
        rows.append({
            "rep": rep, "method": method,
            "r1": scores["r1"], "r2": scores["r2"], "kappa": scores["kappa"],
            "coverage": coverage if method == "post" else None,
            "length": length if method == "post" else None,
        })
    return rows


def run_bench(config: BenchConfig) -> BenchReport:
    """Replicated benchmark; summary rows are replicate means."""
    t0 = time.perf_counter()
    truth = dgp_preset(config.dgp, config.d).coef[0]
    nested = parallel_map(lambda r: _one_replicate(config, truth, r),
                          list(range(config.reps)))
    per_rep = tuple(row for rows in nested for row in rows)
    summary = {}
    for method in config.methods:
        rows = [r for r in per_rep if r["method"] == method]
        entry = {
            "r1": float(np.mean([r["r1"] for r in rows])),
            "r2": float(np.mean([r["r2"] for r in rows])),
            "kappa": float(np.mean([r["kappa"] for r in rows])),
            "coverage": None,
            "ci_length": None,
        }
        if method == "post" and rows and rows[0]["coverage"] is not None:
            entry["coverage"] = float(np.mean([r["coverage"] for r in rows]))
            entry["ci_length"] = float(np.mean([r["length"] for r in rows]))
        summary[method] = entry
    return BenchReport(config, per_rep, summary, time.perf_counter() - t0)


def bench_report_csv(report: BenchReport) -> str:
    """Deterministic summary CSV (wall time intentionally excluded)."""
    out = StringIO()
    out.write("dgp,method,reps,b,lambda,bd,h_n,r1,r2,kappa,coverage,ci_length\n")
    cfg = report.config
    for method in cfg.methods:
        row = report.summary[method]
        cells = [cfg.dgp, method, str(cfg.reps), str(cfg.B),
                 fmt_float(cfg.lam), fmt_float(cfg.bd), fmt_float(cfg.h_n),
                 fmt_float(row["r1"]), fmt_float(row["r2"]),
                 fmt_float(row["kappa"]),
                 "" if row["coverage"] is None else fmt_float(row["coverage"]),
                 "" if row["ci_length"] is None else fmt_float(row["ci_length"])]
        out.write(",".join(cells) + "\n")
    return out.getvalue()
