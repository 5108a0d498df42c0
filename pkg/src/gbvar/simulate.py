"""Forward simulation of the binary VAR recursion, plus named presets.

Each coordinate of X_t is produced by a per-row multinomial draw over
d*p + 1 slots: slot q*d + l copies X_{t-q-1,l} (complemented when the
underlying coefficient is negative), the final slot emits a fresh
Bernoulli innovation.

Reproducibility contract: all random draws are pre-generated from one
counter-based stream in a fixed, documented order (initial-state
uniforms, then slot uniforms, then innovations), so panels are
bit-identical across platforms, backends, and thread counts for a given
(params, config).
"""

import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.stats import norm

from . import _backend
from .errors import UnknownPreset, UserInputError
from .model import (CompanionForm, CounterpartParams, GbvarParams,
                    stationarity_diagnostics, structural_row_probs,
                    validate_params)
from .panel import BinaryPanel

ParamsLike = Union[GbvarParams, CompanionForm]

INNOVATION_MODES = ("independent", "gaussian-copula")


@dataclass(frozen=True)
class SimConfig:
    """Simulation run settings.

    seed may be an int or a tuple of ints; tuples let callers key
    derived streams (seed, replicate, purpose) without collisions.
    """

    n: int
    burn_in: int = 1000
    seed: Union[int, tuple] = 0
    innovation_mode: str = "independent"
    innovation_corr: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 1:
            raise UserInputError("n must be positive")
        if self.burn_in < 0:
            raise UserInputError("burn_in must be nonnegative")
        if self.innovation_mode not in INNOVATION_MODES:
            raise UserInputError(
                f"innovation_mode must be one of {INNOVATION_MODES}")
        if self.innovation_corr is not None:
            R = np.asarray(self.innovation_corr, dtype=float)
            if R.ndim != 2 or R.shape[0] != R.shape[1]:
                raise UserInputError("innovation_corr must be square")
            if not np.allclose(R, R.T, atol=1e-10):
                raise UserInputError("innovation_corr must be symmetric")
            if not np.allclose(np.diag(R), 1.0, atol=1e-10):
                raise UserInputError("innovation_corr needs a unit diagonal")
            if np.linalg.eigvalsh(R).min() < -1e-10:
                raise UserInputError(
                    "innovation_corr must be positive semidefinite")
            R = R.copy()
            R.flags.writeable = False
            object.__setattr__(self, "innovation_corr", R)
        elif self.innovation_mode == "gaussian-copula":
            raise UserInputError(
                "gaussian-copula mode needs innovation_corr")


def _seed_stream(seed) -> np.random.Generator:
    key = [int(s) for s in seed] if isinstance(seed, (tuple, list)) else [int(seed)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def _slot_tables(obj: ParamsLike):
    """cum (d, m), slot_src (m,), slot_flip (d, m) for the kernel."""
    probs = structural_row_probs(obj)
    if isinstance(obj, GbvarParams):
        signed = np.concatenate(list(obj.coef), axis=1)
    else:
        signed = np.asarray(obj.coef, dtype=float)
    d, m = probs.shape
    cum = np.ascontiguousarray(np.cumsum(probs, axis=1))
    slot_src = np.concatenate([np.arange(m - 1), [-1]]).astype(np.int64)
    slot_flip = np.zeros((d, m), dtype=np.uint8)
    slot_flip[:, : m - 1] = signed < 0
    return cum, slot_src, slot_flip


def _select_slot(cum_row: np.ndarray, u: float) -> int:
    # count of cumulative values <= u, clamped; matches both kernels
    return int(min(np.count_nonzero(cum_row <= u), cum_row.shape[0] - 1))


def draw_row_coefficient(k: int, counterpart: CounterpartParams,
                         rng: np.random.Generator) -> int:
    """One multinomial slot draw for row k.

    Returns the selected slot index in 0..d*p; the final slot is the
    innovation. Deterministic given the rng state.
    """
    cum = np.cumsum(counterpart.row_probs[k])
    return _select_slot(cum, rng.random())


def step(params: GbvarParams, counterpart: CounterpartParams,
         x_prev: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Single transition: p lagged states -> next state in {0,1}^d.

    x_prev is (p, d) or flat (p*d,), most recent lag first. Draws d slot
    uniforms, then d innovation uniforms (independent Bernoulli mode).
    """
    p, d = params.p, params.d
    lag = np.asarray(x_prev, dtype=np.int64).reshape(p * d)
    cum, slot_src, slot_flip = _slot_tables(params)
    u = rng.random(d)
    e = (rng.random(d) < params.mu_e).astype(np.int64)
    out = np.empty(d, dtype=np.uint8)
    for k in range(d):
        j = _select_slot(cum[k], u[k])
        src = slot_src[j]
        if src < 0:
            out[k] = e[k]
        elif slot_flip[k, j]:
            out[k] = 1 - lag[src]
        else:
            out[k] = lag[src]
    return out


def _innovations(mu_e: np.ndarray, T: int, config: SimConfig,
                 rng: np.random.Generator) -> np.ndarray:
    """Pre-generate the (T, d) innovation panel, Bernoulli margins mu_e."""
    if config.innovation_mode == "independent":
        return (rng.random((T, mu_e.shape[0])) < mu_e).astype(np.uint8)
    R = np.asarray(config.innovation_corr, dtype=float)
    if R.shape[0] != mu_e.shape[0]:
        raise UserInputError("innovation_corr dimension does not match d")
    w, V = np.linalg.eigh(R)
    factor = V * np.sqrt(np.clip(w, 0.0, None))
    z = rng.standard_normal((T, mu_e.shape[0])) @ factor.T
    # unit marginal variances, so thresholding preserves the margins
    return (z <= norm.ppf(mu_e)).astype(np.uint8)


def simulate(params: ParamsLike, config: SimConfig) -> BinaryPanel:
    """Simulate n observations after discarding burn_in.

    Draw order from a single stream keyed by config.seed:
    (1) p*d initial-state uniforms -> Bernoulli(mu_e) starting lags,
    (2) (burn_in + n) x d slot uniforms,
    (3) (burn_in + n) x d innovations.
    """
    report = stationarity_diagnostics(params)
    if not report.is_stationary:
        warnings.warn(
            "parameters fail the stationarity diagnostics "
            f"(max row sum {report.max_rowsum:.4g}, spectral radius "
            f"{report.spectral_radius:.4g}); simulating anyway",
            RuntimeWarning, stacklevel=2)
    if isinstance(params, GbvarParams):
        p, d, mu_e = params.p, params.d, params.mu_e
    else:
        p, d, mu_e = 1, params.d, params.mu_e
    if config.innovation_corr is not None and config.innovation_corr.shape[0] != d:
        raise UserInputError("innovation_corr dimension does not match d")
    rng = _seed_stream(config.seed)
    T = config.burn_in + config.n
    x0 = (rng.random((p, d)) < mu_e).astype(np.uint8).reshape(p * d)
    u = rng.random((T, d))
    e = _innovations(mu_e, T, config, rng)
    cum, slot_src, slot_flip = _slot_tables(params)
    X = _backend.simulate_chain(cum, slot_src, slot_flip,
                                np.ascontiguousarray(u),
                                np.ascontiguousarray(e), x0)
    return BinaryPanel(X[config.burn_in:])


# -- named parameter presets --------------------------------------------------

def _band_cells(d: int):
    """Off-diagonal band: 1-based (i, i-1) and (i, i+1), inside 1..d."""
    cells = []
    for k in range(d):
        if k - 1 >= 0:
            cells.append((k, k - 1))
        if k + 1 < d:
            cells.append((k, k + 1))
    return cells


def _cross_cells(d: int):
    """Diagonal plus anti-diagonal shifted by one: (i, i) and (i, d-i)."""
    cells = set()
    for k in range(d):
        cells.add((k, k))
        j = d - 2 - k  # 1-based column d - i
        if 0 <= j < d:
            cells.add((k, j))
    return sorted(cells)


def _from_cells(d: int, cells, value: float) -> GbvarParams:
    A = np.zeros((d, d))
    for k, j in cells:
        A[k, j] = value
    beta = 1.0 - np.abs(A).sum(axis=1)
    return validate_params([A], beta, 0.5 * np.ones(d))


def dgp_preset(name: str, d: Optional[int] = None) -> GbvarParams:
    """Named parameter sets used throughout the tests and the CLI.

    dgp1: off-diagonal band of 0.3, boundary rows keep beta 0.7.
    dgp2: X-shaped 0.3 pattern, diagonal crossing the reversed diagonal;
          rows where the arms collide or leave the grid carry one cell,
          so beta is 0.7 there and 0.4 elsewhere.
    dgp3: dgp1 with columns reversed (anti-band).
    example1: the fixed 3x3 signed matrix; its third row is completed to
          an exact unit sum by beta_3 = 0.25.
    random-graph: dgp1 dynamics for edge indicators, default d = 45.
    """
    key = name.strip().lower()
    if key in ("dgp1", "dgp2", "dgp3"):
        if d is None or d < 3:
            raise UserInputError(f"{key} needs d >= 3")
        if key == "dgp1":
            return _from_cells(d, _band_cells(d), 0.3)
        if key == "dgp2":
            return _from_cells(d, _cross_cells(d), 0.3)
        cells = [(k, d - 1 - j) for k, j in _band_cells(d)]
        return _from_cells(d, cells, 0.3)
    if key == "example1":
        if d not in (None, 3):
            raise UserInputError("example1 is fixed at d = 3")
        A = np.array([[0.15, -0.25, 0.49],
                      [-0.19, 0.27, 0.28],
                      [0.17, -0.37, 0.21]])
        beta = np.array([0.11, 0.26, 0.25])
        mu_e = np.array([0.48, 0.52, 0.47])
        return validate_params([A], beta, mu_e)
    if key == "random-graph":
        dd = 45 if d is None else d
        if dd < 3:
            raise UserInputError("random-graph needs d >= 3")
        return _from_cells(dd, _band_cells(dd), 0.3)
    raise UnknownPreset(name)


PRESET_NAMES = ("dgp1", "dgp2", "dgp3", "example1", "random-graph")
