"""Second-order wild bootstrap for the post-selection estimator.

The scheme perturbs the lag-1 sample covariance with kernel-correlated
Gaussian multipliers applied to the second-order residuals

    Theta_t = (X_{t+1} - Xbar)(X_t - Xbar)^T - Ahat (X_t - Xbar)(X_t - Xbar)^T,

refits the (fixed) selected supports on the perturbed covariance, and
calibrates the max statistic  psi* = max_{ij} sqrt(n)|a*_{ij} - a_{ij}|
over B replicates. Theta_t is rank one, r_t c_t^T, which this module
exploits throughout: a replicate never materializes a d x d x t tensor,
only the per-entry loading matrix V with  Delta* = V^T e / sqrt(n).
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy.linalg import toeplitz as _toeplitz

from ._util import ESTIMATOR_EVALS, substream
from .errors import (CovarianceNotPSD, InvalidLevel, PanelTooShort,
                     ShapeMismatch, UserInputError)
from .estimate import PostSelectionFit, pinv_block, refit_rows
from .model import _freeze
from .moments import LagCovariances
from .panel import BinaryPanel

REPLICATE_BATCH = 1024  # multiplier vectors drawn per BLAS batch


def gaussian_kernel(x):
    """exp(-x^2/2): the default multiplier-correlation kernel.

    Its Fourier transform is a positive Gaussian, so every Toeplitz
    correlation matrix it generates is positive semidefinite.
    """
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x)


@dataclass(frozen=True)
class Kernel:
    """Named even kernel with K(0)=1, nonincreasing on [0, inf)."""

    name: str
    fn: Callable

    def __call__(self, x):
        return self.fn(x)


GAUSSIAN = Kernel("gaussian", gaussian_kernel)
KERNELS = {"gaussian": GAUSSIAN}


def check_kernel(kernel: Kernel, grid_max: float = 10.0,
                 points: int = 201) -> None:
    """Numerically verify the kernel conditions on a grid.

    Checks K(0)=1, evenness, monotone decay on [0, grid_max], finite
    integral, and a nonnegative Fourier transform (within -1e-9) on
    xi in [-grid_max, grid_max]. Raises UserInputError on violation.
    """
    from scipy.integrate import quad

    x = np.linspace(0.0, grid_max, points)
    kx = np.asarray(kernel(x), dtype=float)
    if abs(float(kernel(np.array(0.0))) - 1.0) > 1e-12:
        raise UserInputError(f"kernel {kernel.name}: K(0) must be 1")
    if np.max(np.abs(kx - np.asarray(kernel(-x)))) > 1e-12:
        raise UserInputError(f"kernel {kernel.name}: K must be even")
    if np.any(np.diff(kx) > 1e-12):
        raise UserInputError(f"kernel {kernel.name}: K must be nonincreasing on [0, inf)")
    total, _ = quad(lambda t: float(kernel(np.array(t))), 0.0, np.inf, limit=200)
    if not np.isfinite(total):
        raise UserInputError(f"kernel {kernel.name}: K must be integrable")
    for xi in np.linspace(-grid_max, grid_max, 41):
        # FT of an even function: 2 * integral of K(t) cos(xi t)
        val, _ = quad(lambda t: float(kernel(np.array(t))), 0.0, 4 * grid_max,
                      weight="cos", wvar=xi, limit=200)
        if 2.0 * val < -1e-9:
            raise UserInputError(
                f"kernel {kernel.name}: Fourier transform negative at {xi:.3g}")


def resolve_kernel(kernel: Union[str, Kernel]) -> Kernel:
    if isinstance(kernel, Kernel):
        return kernel
    try:
        return KERNELS[str(kernel).lower()]
    except KeyError:
        raise UserInputError(f"unknown kernel {kernel!r}; "
                             f"known: {sorted(KERNELS)}") from None


def default_bandwidth(n: int) -> float:
    """Cube-root default; reproduction runs override it explicitly."""
    return float(n) ** (1.0 / 3.0)


@dataclass(frozen=True)
class BootstrapConfig:
    B: int
    alpha: float
    h_n: float
    kernel: Union[str, Kernel] = GAUSSIAN
    seed: Union[int, tuple] = 0

    def __post_init__(self):
        if self.B < 1:
            raise UserInputError("B must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidLevel(f"alpha must be in (0, 1), got {self.alpha}")
        if self.h_n <= 0:
            raise UserInputError("h_n must be positive")
        object.__setattr__(self, "kernel", resolve_kernel(self.kernel))


@dataclass(frozen=True)
class SecondOrderResiduals:
    """The n-1 residual matrices Theta_t, stored as rank-one factors.

    Theta_t = outer(r[t], c[t]) with c_t the centered state and r_t the
    centered one-step-ahead state minus its fitted value.
    """

    r: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", _freeze(np.asarray(self.r, float)))
        object.__setattr__(self, "c", _freeze(np.asarray(self.c, float)))
        if self.r.shape != self.c.shape:
            raise ShapeMismatch("residual factors must share a shape")

    def __len__(self) -> int:
        return self.r.shape[0]

    def __getitem__(self, t: int) -> np.ndarray:
        return np.outer(self.r[t], self.c[t])

    def weighted_sum(self, e: np.ndarray) -> np.ndarray:
        """sum_t e_t Theta_t without forming any Theta_t."""
        return (self.r * np.asarray(e)[:, None]).T @ self.c


def second_order_residuals(panel, estimate: np.ndarray) -> SecondOrderResiduals:
    """Lag-1 second-order residuals of a fitted transition matrix."""
    X = panel.data if isinstance(panel, BinaryPanel) else np.asarray(panel)
    n, d = X.shape
    if n < 2:
        raise PanelTooShort(f"need at least 2 rows, got {n}")
    A = np.asarray(estimate, dtype=float)
    if A.shape != (d, d):
        raise ShapeMismatch(f"estimate is {A.shape}, panel dimension is {d}")
    Xc = X.astype(float) - X.mean(axis=0)
    c = Xc[:-1]
    r = Xc[1:] - c @ A.T
    return SecondOrderResiduals(r, c)


# -- correlated Gaussian multipliers -------------------------------------------

JITTER_LADDER = (0.0, 1e-14, 1e-12, 1e-10, 1e-8)


@lru_cache(maxsize=2)
def _cached_cholesky(m: int, h_n: float, kernel: Kernel):
    col = np.asarray(kernel(np.arange(m) / h_n), dtype=float)
    T = _toeplitz(col)
    eye = np.eye(m)
    for delta in JITTER_LADDER:
        try:
            L = np.linalg.cholesky(T + delta * eye if delta else T)
        except np.linalg.LinAlgError:
            continue
        L.flags.writeable = False
        return L, delta
    raise CovarianceNotPSD(
        f"kernel Toeplitz matrix (m={m}, h_n={h_n:g}) is not positive "
        f"semidefinite even with jitter {JITTER_LADDER[-1]:g}")


def toeplitz_cholesky(m: int, h_n: float, kernel: Union[str, Kernel] = GAUSSIAN):
    """Lower Cholesky factor of T_{st} = K((s-t)/h_n), with the jitter
    delta that was needed (0.0 in the usual case). Cached across calls
    because one bootstrap run reuses the factor for every replicate."""
    return _cached_cholesky(m, float(h_n), resolve_kernel(kernel))


def correlated_normals(n: int, h_n: float, kernel, rng: np.random.Generator,
                       chol: np.ndarray = None) -> np.ndarray:
    """One multiplier vector e with E e_s e_t = K((s-t)/h_n)."""
    L = toeplitz_cholesky(n, h_n, kernel)[0] if chol is None else chol
    return L @ rng.standard_normal(n)


# -- replicate machinery --------------------------------------------------------

def delta_loadings(resid: SecondOrderResiduals, fit: PostSelectionFit,
                   cov: LagCovariances):
    """Per-entry linear loadings of the bootstrap perturbation.

    Returns (V, entries): V[t, a] is the coefficient of multiplier e_t in
    n*(a*_{entries[a]} - a_{entries[a]}); entries lists the selected
    (row, column) pairs in row-major order. Columns off every support
    never enter (their perturbation is structurally zero).
    """
    gram = cov.sigma0.T @ cov.sigma0
    m = len(resid)
    cols, entries = [], []
    for i, S in enumerate(fit.supports):
        S = np.asarray(S, dtype=int)
        if not S.size:
            continue
        F_block = pinv_block(gram[np.ix_(S, S)])
        proj = resid.c @ (cov.sigma0[:, S] @ F_block)  # (m, |S|)
        cols.append(resid.r[:, i][:, None] * proj)
        entries.extend((i, int(j)) for j in S)
    V = np.concatenate(cols, axis=1) if cols else np.zeros((m, 0))
    return V, entries


def conditional_covariance(V: np.ndarray, n: int, h_n: float,
                           kernel=GAUSSIAN) -> np.ndarray:
    """Analytic conditional covariance of the bootstrap roots.

    Cov*(Delta*_a, Delta*_b) = (1/n) V_a^T T V_b with T the kernel
    Toeplitz matrix, accumulated lag by lag so T itself is never built.
    Assumes the kernel is nonincreasing (lag loop stops once the weight
    underflows 1e-20).
    """
    kernel = resolve_kernel(kernel) if not callable(kernel) else kernel
    m = V.shape[0]
    C = V.T @ V
    for k in range(1, m):
        w = float(kernel(np.array(k / h_n)))
        if w < 1e-20:
            break
        cross = V[k:].T @ V[:m - k]
        C += w * (cross + cross.T)
    C /= n
    return (C + C.T) / 2.0


def replicate_estimate(fit: PostSelectionFit, cov: LagCovariances,
                       resid: SecondOrderResiduals, e: np.ndarray) -> np.ndarray:
    """One replicate by the literal route: perturb sigma1, refit supports.

    sigma1* = sigma1 + (1/n) sum_t e_t Theta_t, then the closed-form
    refit on the original supports. Numerically identical to the loading
    route (V^T e); tests cross-check the two, production uses loadings.
    """
    sigma1_star = cov.sigma1 + resid.weighted_sum(e) / cov.n
    return refit_rows(sigma1_star, cov.sigma0, fit.supports)


def critical_index(B: int, alpha: float) -> int:
    """k = min{s : s/B >= 1 - alpha}, clamped to 1..B."""
    k = math.ceil(B * (1.0 - alpha) - 1e-9)
    return min(max(k, 1), B)


@dataclass(frozen=True)
class BootstrapResult:
    """Sorted replicate maxima and the derived critical value.

    critical_value is psi*_(k) with k = critical_index(B, alpha);
    ci_halfwidth = critical_value / sqrt(n).
    """

    psi_stars: np.ndarray
    critical_value: float
    ci_halfwidth: float
    alpha: float
    h_n: float
    kernel_name: str
    n: int
    jitter: float
    seed: Union[int, tuple]

    def __post_init__(self):
        object.__setattr__(self, "psi_stars", _freeze(np.asarray(self.psi_stars, float)))

    @property
    def B(self) -> int:
        return self.psi_stars.shape[0]


def bootstrap_run(panel, fit: PostSelectionFit, cov: LagCovariances,
                  config: BootstrapConfig) -> BootstrapResult:
    """Run B wild-bootstrap replicates and calibrate the max statistic.

    Replicate b draws its multipliers from the substream (seed, b), so
    results are independent of batching and thread schedule. Each
    replicate's statistic is psi*_b = max |V^T e_b| / sqrt(n), the max
    running over selected entries (unselected entries perturb by exactly
    zero, so the max over all entries is the same number).
    """
    resid = second_order_residuals(panel, fit.estimate)
    if cov.n != len(resid) + 1:
        raise ShapeMismatch("moments and panel disagree on the sample size")
    V, _ = delta_loadings(resid, fit, cov)
    m = len(resid)
    L, jitter = toeplitz_cholesky(m, config.h_n, config.kernel)
    scale = 1.0 / math.sqrt(cov.n)
    psis = np.zeros(config.B)
    for start in range(0, config.B, REPLICATE_BATCH):
        stop = min(start + REPLICATE_BATCH, config.B)
        Z = np.empty((m, stop - start))
        for b in range(start, stop):
            Z[:, b - start] = substream(config.seed, b).standard_normal(m)
        E = L @ Z
        if V.shape[1]:
            psis[start:stop] = np.abs(V.T @ E).max(axis=0) * scale
    ESTIMATOR_EVALS.add(config.B)
    psi_sorted = np.sort(psis)
    c_star = float(psi_sorted[critical_index(config.B, config.alpha) - 1])
    return BootstrapResult(psi_sorted, c_star, c_star / math.sqrt(cov.n),
                           config.alpha, config.h_n, config.kernel.name,
                           cov.n, jitter, config.seed)


# -- inference outputs ----------------------------------------------------------

def simultaneous_ci(result: BootstrapResult, fit: PostSelectionFit, n: int) -> dict:
    """Entrywise simultaneous intervals a_{ij} +/- c*/sqrt(n).

    selected flags which entries carry inferential weight; unselected
    entries get the same halfwidth around their structural zero, but the
    calibration argument only covers the selected set.
    """
    hw = result.critical_value / math.sqrt(n)
    selected = np.zeros(fit.estimate.shape, dtype=bool)
    for i, S in enumerate(fit.supports):
        selected[i, list(S)] = True
    return {
        "lower": fit.estimate - hw,
        "upper": fit.estimate + hw,
        "halfwidth": hw,
        "selected": selected,
    }


def hypothesis_test(result: BootstrapResult, fit: PostSelectionFit,
                    null_matrix: np.ndarray, n: int) -> dict:
    """Reject the simple null A = A0 iff max_ij sqrt(n)|a_{ij} - A0_{ij}|
    exceeds the bootstrap critical value. The max runs over all entries."""
    A0 = np.asarray(null_matrix, dtype=float)
    if A0.shape != fit.estimate.shape:
        raise ShapeMismatch(f"null matrix is {A0.shape}, "
                            f"estimate is {fit.estimate.shape}")
    stat = float(math.sqrt(n) * np.abs(fit.estimate - A0).max())
    return {
        "statistic": stat,
        "critical_value": result.critical_value,
        "reject": bool(stat > result.critical_value),
    }


def longrun_cov_estimate(series: np.ndarray, h_n: float,
                         kernel=GAUSSIAN) -> np.ndarray:
    """Kernel quadratic form (1/n) sum_{t1,t2} K((t1-t2)/h_n) x_{t1} x_{t2}^T.

    For a centered short-range-dependent series this approximates the
    long-run covariance n Cov(xbar); it exists here as the test surface
    for the multiplier-correlation construction.
    """
    kernel = resolve_kernel(kernel) if not callable(kernel) else kernel
    X = np.asarray(series, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    C = X.T @ X
    for k in range(1, n):
        w = float(kernel(np.array(k / h_n)))
        if w < 1e-20:
            break
        cross = X[k:].T @ X[:-k]
        C += w * (cross + cross.T)
    C /= n
    return (C + C.T) / 2.0


def bootstrap_result_to_dict(result: BootstrapResult, strings: bool = False) -> dict:
    def enc(x):
        return repr(float(x)) if strings else float(x)

    return {
        "B": result.B,
        "alpha": enc(result.alpha),
        "h_n": enc(result.h_n),
        "kernel": result.kernel_name,
        "n": result.n,
        "jitter": enc(result.jitter),
        "critical_value": enc(result.critical_value),
        "ci_halfwidth": enc(result.ci_halfwidth),
        "psi_stars": [enc(v) for v in result.psi_stars],
    }
