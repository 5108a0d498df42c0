"""Chronological train/test search for the penalty and the threshold.

The panel is split at floor(train_fraction * n): training rows fit the
estimator, test rows score it by how well the fitted matrix maps the
test lag-0 covariance onto the test lag-1 covariance. The split is never
shuffled; shuffling would destroy the serial dependence the score is
supposed to measure.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._util import parallel_map
from .errors import PanelTooShort, UserInputError
from .estimate import LassoConfig, lasso_matrix, refit_rows, select_support
from .moments import sample_moments
from .panel import BinaryPanel

CRITERIA = ("tau1", "tau2")


def default_lambda_grid() -> np.ndarray:
    return np.logspace(-7, -1, 15)


def default_bd_grid() -> np.ndarray:
    return np.linspace(0.0, 0.3, 16)


@dataclass(frozen=True)
class TuneGrid:
    lambda_grid: np.ndarray = field(default_factory=default_lambda_grid)
    bd_grid: np.ndarray = field(default_factory=default_bd_grid)
    criterion: str = "tau2"
    train_fraction: float = 0.75

    def __post_init__(self):
        lg = np.atleast_1d(np.asarray(self.lambda_grid, dtype=float))
        bg = np.atleast_1d(np.asarray(self.bd_grid, dtype=float))
        if lg.size == 0 or bg.size == 0:
            raise UserInputError("grids must be nonempty")
        if (lg < 0).any() or (bg < 0).any():
            raise UserInputError("grid values must be nonnegative")
        if self.criterion not in CRITERIA:
            raise UserInputError(f"criterion must be one of {CRITERIA}")
        if not 0.0 < self.train_fraction < 1.0:
            raise UserInputError("train_fraction must be in (0, 1)")
        object.__setattr__(self, "lambda_grid", lg)
        object.__setattr__(self, "bd_grid", bg)


@dataclass(frozen=True)
class TuneResult:
    lam: float
    bd: float
    score: float
    criterion: str
    table: tuple  # rows (lam, bd, tau1, tau2) over the full grid


def matrix_l1_norm(M: np.ndarray) -> float:
    """Induced 1-norm: max absolute column sum."""
    M = np.asarray(M, dtype=float)
    return float(np.abs(M).sum(axis=0).max()) if M.size else 0.0


def spectral_norm(M: np.ndarray, tol: float = 1e-9, max_iter: int = 500) -> float:
    """Largest singular value by power iteration on M^T M."""
    M = np.asarray(M, dtype=float)
    if M.size == 0 or not np.any(M):
        return 0.0
    G = M.T @ M
    v = np.ones(G.shape[0]) / np.sqrt(G.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        w = G @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v_next = w / norm
        if abs(norm - lam) <= tol * max(1.0, norm):
            lam = norm
            break
        lam, v = norm, v_next
    return float(np.sqrt(lam))


def tune(panel, grid: Optional[TuneGrid] = None,
         lasso_config: Optional[LassoConfig] = None) -> TuneResult:
    """Grid search (lambda, b_d) minimizing the held-out moment-fit score.

    tau1 = |sigma1_test - A sigma0_test|_1, tau2 the same in spectral
    norm. The Lasso path is computed once per lambda on the training
    moments; every b_d then reuses it (thresholding is free). Ties break
    toward larger lambda, then larger b_d: the sparser model wins.
    """
    if grid is None:
        grid = TuneGrid()
    X = panel.data if isinstance(panel, BinaryPanel) else np.asarray(panel)
    n = X.shape[0]
    n_train = int(np.floor(grid.train_fraction * n))
    if n_train < 2 or n - n_train < 2:
        raise PanelTooShort(
            f"split {n_train}/{n - n_train} leaves a segment below 2 rows")
    cov_train = sample_moments(X[:n_train])
    cov_test = sample_moments(X[n_train:])

    def score_lambda(lam):
        cfg = (LassoConfig(lam) if lasso_config is None
               else LassoConfig(lam, lasso_config.max_iter, lasso_config.tol))
        A_hat = lasso_matrix(cov_train, cfg)
        rows = []
        for bd in grid.bd_grid:
            supports = [select_support(row, bd) for row in A_hat]
            est = refit_rows(cov_train.sigma1, cov_train.sigma0, supports)
            R = cov_test.sigma1 - est @ cov_test.sigma0
            rows.append((float(lam), float(bd),
                         matrix_l1_norm(R), spectral_norm(R)))
        return rows

    table = [row for rows in parallel_map(score_lambda, list(grid.lambda_grid))
             for row in rows]
    pick = 2 if grid.criterion == "tau1" else 3
    best = min(table, key=lambda row: (row[pick], -row[0], -row[1]))
    return TuneResult(best[0], best[1], best[pick], grid.criterion, tuple(table))
