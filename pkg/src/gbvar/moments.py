"""Sample mean, lag-0/1 autocovariances, and the dense least-squares baseline.

Conventions locked by fixture tests: both lags divide by n (never n-k),
and both factors are centered at the full-sample mean.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PanelTooShort, SingularCovariance
from .model import _freeze
from .panel import BinaryPanel


@dataclass(frozen=True)
class LagCovariances:
    """X-bar, Sigma-hat(0), Sigma-hat(1), and the sample size behind them."""

    mean: np.ndarray
    sigma0: np.ndarray
    sigma1: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "mean", _freeze(np.asarray(self.mean, dtype=float)))
        object.__setattr__(self, "sigma0", _freeze(np.asarray(self.sigma0, dtype=float)))
        object.__setattr__(self, "sigma1", _freeze(np.asarray(self.sigma1, dtype=float)))

    @property
    def d(self) -> int:
        return self.mean.shape[0]


def sample_moments(panel) -> LagCovariances:
    """Mean and lag-0/1 autocovariance matrices of a binary panel.

    sigma_k = (1/n) sum_{t=1}^{n-k} (X_{t+k} - Xbar)(X_t - Xbar)^T for
    k = 0, 1; sigma0 is symmetrized after accumulation to kill rounding
    skew.
    """
    X = panel.data if isinstance(panel, BinaryPanel) else np.asarray(panel)
    n = X.shape[0]
    if n < 2:
        raise PanelTooShort(f"need at least 2 rows, got {n}")
    Xc = X.astype(float) - X.mean(axis=0)
    sigma0 = Xc.T @ Xc / n
    sigma0 = (sigma0 + sigma0.T) / 2.0
    sigma1 = Xc[1:].T @ Xc[:-1] / n
    return LagCovariances(X.mean(axis=0), sigma0, sigma1, n)


def yule_walker_ols(cov: LagCovariances) -> np.ndarray:
    """Dense moment-equation solve A-hat = sigma1 sigma0^{-1}.

    Only usable when sigma0 is well conditioned (d << n); the sparse
    path exists precisely because this breaks down once d approaches n.
    """
    if np.linalg.cond(cov.sigma0) > 1e12:
        raise SingularCovariance(
            "lag-0 covariance is numerically singular; use the sparse estimator")
    # sigma0 is symmetric, so solving on the right is a plain solve
    return np.linalg.solve(cov.sigma0, cov.sigma1.T).T


def moments_to_dict(cov: LagCovariances, strings: bool = False) -> dict:
    """JSON-ready dict; strings=True encodes reals via repr for exact
    round-trips independent of the JSON writer."""
    def enc(x):
        return repr(float(x)) if strings else float(x)

    return {
        "n": cov.n,
        "d": cov.d,
        "mean": [enc(v) for v in cov.mean],
        "sigma0": [[enc(v) for v in row] for row in cov.sigma0],
        "sigma1": [[enc(v) for v in row] for row in cov.sigma1],
    }


def moments_from_dict(doc: dict) -> LagCovariances:
    mean = np.array([float(v) for v in doc["mean"]])
    sigma0 = np.array([[float(v) for v in row] for row in doc["sigma0"]])
    sigma1 = np.array([[float(v) for v in row] for row in doc["sigma1"]])
    return LagCovariances(mean, sigma0, sigma1, int(doc["n"]))
