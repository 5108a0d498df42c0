"""Sparse transition-matrix estimation: row Lasso, thresholded support
selection, the partial-inverse operator, and the post-selection
least-squares refit, plus the row-wise error metrics used to evaluate
fits against a known truth.

Estimation pipeline, per row i of the transition matrix:

1. Lasso on the moment regression  (1/2d)|sigma1[i]^T - sigma0 w|^2 + lam|w|_1
2. keep coordinates with |w_j| strictly above the threshold b_d
3. refit by the closed form  sigma1[i] sigma0 F_S(sigma0^T sigma0),
   where F_S pads the pseudo-inverse of the S x S block back to d x d.

The closed form and the direct least squares restricted to S agree
whenever the restricted Gram block is invertible; the closed form is
authoritative in degenerate cases (pseudo-inverse semantics).
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend
from ._util import ESTIMATOR_EVALS
from .errors import ShapeMismatch, UserInputError
from .model import _freeze
from .moments import LagCovariances


@dataclass(frozen=True)
class LassoConfig:
    """Penalty and coordinate-descent stopping rule."""

    lam: float
    max_iter: int = 100_000
    tol: float = 1e-8

    def __post_init__(self):
        if self.lam < 0:
            raise UserInputError("lambda must be nonnegative")
        if self.max_iter < 1:
            raise UserInputError("max_iter must be at least 1")
        if self.tol <= 0:
            raise UserInputError("tol must be positive")


@dataclass(frozen=True)
class PostSelectionFit:
    """Raw Lasso matrix, selected supports, and the refitted estimate.

    estimate[i, j] is exactly 0 for j outside supports[i]; supports are
    0-based sorted tuples (row/column indices are 1-based in the
    methodology write-ups, 0-based everywhere in this package and its
    file formats).
    """

    lasso_matrix: np.ndarray
    supports: tuple
    estimate: np.ndarray
    threshold: float
    config: LassoConfig
    converged: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lasso_matrix", _freeze(np.asarray(self.lasso_matrix, float)))
        object.__setattr__(self, "estimate", _freeze(np.asarray(self.estimate, float)))
        object.__setattr__(self, "supports",
                           tuple(tuple(int(j) for j in s) for s in self.supports))

    @property
    def d(self) -> int:
        return self.lasso_matrix.shape[0]


# -- Lasso --------------------------------------------------------------------

def _gram_parts(X: np.ndarray, Y: np.ndarray):
    """G = X^T X / d and g = Y X / d for the Gram-form solver; Y rows are
    the regression targets transposed (y_i^T)."""
    d = X.shape[0]
    G = np.ascontiguousarray(X.T @ X / d)
    g = np.ascontiguousarray(Y @ X / d)
    return G, g


def lasso_row(y: np.ndarray, X: np.ndarray, config: LassoConfig) -> np.ndarray:
    """argmin_w (1/2d)|y - Xw|^2 + lam |w|_1 by coordinate descent.

    Warns (and returns the best iterate) when max_iter is exhausted
    before coordinate updates fall below tol.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    G, g = _gram_parts(X, y[None, :])
    W, _, converged = _backend.lasso_cd_multi(
        G, g, config.lam, np.zeros((1, X.shape[1])), config.max_iter, config.tol)
    if not converged:
        warnings.warn(f"coordinate descent stopped at max_iter={config.max_iter} "
                      "before reaching tol", RuntimeWarning, stacklevel=2)
    return W[0]


def lasso_matrix(cov: LagCovariances, config: LassoConfig) -> np.ndarray:
    """All d Lasso rows at once; they share one Gram matrix."""
    G, g = _gram_parts(cov.sigma0, cov.sigma1)
    W, _, converged = _backend.lasso_cd_multi(
        G, g, config.lam, np.zeros_like(g), config.max_iter, config.tol)
    if not converged:
        warnings.warn(f"coordinate descent stopped at max_iter={config.max_iter} "
                      "before reaching tol", RuntimeWarning, stacklevel=2)
    return W


def kkt_residual(w: np.ndarray, y: np.ndarray, X: np.ndarray, lam: float) -> float:
    """Largest stationarity violation of the Lasso optimum conditions.

    0 for an exact optimum; the solver certifies <= 1e-6 at defaults.
    """
    d = X.shape[0]
    grad = X.T @ (X @ w - y) / d
    viol_active = np.abs(grad + lam * np.sign(w))[w != 0]
    viol_zero = np.maximum(np.abs(grad) - lam, 0.0)[w == 0]
    parts = [v.max() for v in (viol_active, viol_zero) if v.size]
    return float(max(parts)) if parts else 0.0


# -- support selection and partial inverse ------------------------------------

def select_support(lasso_row: np.ndarray, b_d: float) -> np.ndarray:
    """Indices with |value| strictly greater than b_d."""
    if b_d < 0:
        raise UserInputError("threshold must be nonnegative")
    return np.flatnonzero(np.abs(lasso_row) > b_d)


def pinv_block(block: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a small symmetric block.

    Eigendecomposition route with relative cutoff 1e-12 * |largest
    eigenvalue|; non-symmetric input falls back to the generic SVD
    pseudo-inverse.
    """
    if block.size == 0:
        return block.copy()
    if not np.allclose(block, block.T, atol=1e-10 * max(1.0, np.abs(block).max())):
        return np.linalg.pinv(block)
    w, V = np.linalg.eigh((block + block.T) / 2.0)
    cutoff = 1e-12 * np.abs(w).max()
    inv_w = np.where(np.abs(w) > cutoff, 1.0 / np.where(w == 0, 1.0, w), 0.0)
    return (V * inv_w) @ V.T


def partial_inverse(A: np.ndarray, S) -> np.ndarray:
    """Zero-padded pseudo-inverse of the S x S sub-block of A.

    Acts as an inverse on row vectors supported on S when the block is
    positive definite: w A F_S(A) = w. Empty S gives the zero matrix.
    """
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    S = np.asarray(sorted(int(j) for j in S), dtype=int)
    F = np.zeros((d, d))
    if S.size:
        F[np.ix_(S, S)] = pinv_block(A[np.ix_(S, S)])
    return F


# -- post-selection refit ------------------------------------------------------

def restricted_ls_row(cov: LagCovariances, i: int, S) -> np.ndarray:
    """Least squares of sigma1[i]^T on the columns of sigma0 indexed by S.

    The direct form of the refit; agrees with the closed-form route when
    the restricted Gram block is invertible.
    """
    d = cov.d
    out = np.zeros(d)
    S = np.asarray(sorted(int(j) for j in S), dtype=int)
    if S.size:
        sol, *_ = np.linalg.lstsq(cov.sigma0[:, S], cov.sigma1[i], rcond=None)
        out[S] = sol
    return out


def refit_rows(sigma1: np.ndarray, sigma0: np.ndarray, supports) -> np.ndarray:
    """Closed-form refit rows sigma1[i] sigma0 F_{S_i}(sigma0^T sigma0).

    Shared by the fit and by bootstrap replicates (which move sigma1 but
    keep the supports fixed). Off-support entries are exact zeros.
    """
    d = sigma0.shape[0]
    gram = sigma0.T @ sigma0
    target = sigma1 @ sigma0
    est = np.zeros((d, d))
    for i, S in enumerate(supports):
        S = np.asarray(S, dtype=int)
        if S.size:
            est[i, S] = target[i, S] @ pinv_block(gram[np.ix_(S, S)])
    return est


def post_select_fit(cov: LagCovariances, lam: float, b_d: float,
                    config: Optional[LassoConfig] = None) -> PostSelectionFit:
    """Lasso, strict thresholding at b_d, closed-form refit per row.

    Rows whose support comes out empty are exactly zero. The refit row is
    sigma1[i] sigma0 F_{S_i}(sigma0^T sigma0), evaluated on the selected
    block only, so off-support entries are structural zeros.
    """
    if config is None:
        config = LassoConfig(lam)
    elif config.lam != lam:
        config = LassoConfig(lam, config.max_iter, config.tol)
    G, g = _gram_parts(cov.sigma0, cov.sigma1)
    A_hat, _, converged = _backend.lasso_cd_multi(
        G, g, config.lam, np.zeros_like(g), config.max_iter, config.tol)
    if not converged:
        warnings.warn("Lasso stage hit max_iter; thresholding its best iterate",
                      RuntimeWarning, stacklevel=2)
    supports = [select_support(row, b_d) for row in A_hat]
    estimate = refit_rows(cov.sigma1, cov.sigma0, supports)
    ESTIMATOR_EVALS.add(1)
    return PostSelectionFit(A_hat, tuple(map(tuple, supports)), estimate,
                            float(b_d), config, converged)


def threshold_matrix(lasso_matrix: np.ndarray, b_d: float) -> np.ndarray:
    """Reporting mode: keep Lasso entries strictly above b_d, no refit."""
    A = np.asarray(lasso_matrix, dtype=float)
    return np.where(np.abs(A) > b_d, A, 0.0)


# -- evaluation metrics --------------------------------------------------------

def metrics(est: np.ndarray, truth: np.ndarray, zero_tol: float = 0.0) -> dict:
    """Row-wise worst-case errors and the support mismatch count.

    r1: max over rows of the l1 error; r2: max over rows of the l2
    error; kappa: number of entries where exactly one of (estimate,
    truth) is zero. Truth zeros are structural (exact); estimate zeros
    are |value| <= zero_tol, with the default 0.0 meaning exact zeros
    (the refit writes structural zeros, so this is well defined).
    """
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if est.shape != truth.shape:
        raise ShapeMismatch(f"shape {est.shape} vs {truth.shape}")
    diff = est - truth
    r1 = float(np.abs(diff).sum(axis=1).max())
    r2 = float(np.sqrt((diff ** 2).sum(axis=1)).max())
    est_zero = np.abs(est) <= zero_tol
    truth_zero = truth == 0.0
    kappa = int(np.count_nonzero(est_zero ^ truth_zero))
    return {"r1": r1, "r2": r2, "kappa": kappa}


# -- serialization -------------------------------------------------------------

def fit_to_dict(fit: PostSelectionFit, strings: bool = False) -> dict:
    def enc(x):
        return repr(float(x)) if strings else float(x)

    return {
        "d": fit.d,
        "lambda": enc(fit.config.lam),
        "threshold": enc(fit.threshold),
        "max_iter": fit.config.max_iter,
        "tol": enc(fit.config.tol),
        "converged": fit.converged,
        "lasso_matrix": [[enc(v) for v in row] for row in fit.lasso_matrix],
        "supports": [list(s) for s in fit.supports],
        "estimate": [[enc(v) for v in row] for row in fit.estimate],
    }


def fit_from_dict(doc: dict) -> PostSelectionFit:
    config = LassoConfig(float(doc["lambda"]), int(doc["max_iter"]),
                         float(doc["tol"]))
    return PostSelectionFit(
        np.array([[float(v) for v in row] for row in doc["lasso_matrix"]]),
        tuple(tuple(int(j) for j in s) for s in doc["supports"]),
        np.array([[float(v) for v in row] for row in doc["estimate"]]),
        float(doc["threshold"]), config, bool(doc["converged"]))
