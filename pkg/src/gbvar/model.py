"""Parameter containers, constraint validation, and stationarity diagnostics.

A generalized binary VAR(p) is parameterized by p signed coefficient
matrices A^(1..p), a diagonal innovation weight vector beta, and innovation
means mu_e. Each row k must satisfy

    sum_{q,l} |alpha^(q)_{kl}| + beta_k = 1,

so that the absolute values together with beta_k form a probability vector:
at every time step, row k copies one lagged coordinate (sign-flipped for a
negative coefficient) or emits a Bernoulli innovation, with those
probabilities.
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    ConstraintViolation,
    InnovationMeanOutOfRange,
    NonpositiveBeta,
    ShapeMismatch,
    SingularSystem,
)

CONSTRAINT_TOL = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GbvarParams:
    """Model identity: coefficient matrices, innovation weights and means.

    Attributes
    ----------
    coef : tuple of p (d, d) arrays
        Signed coefficient matrices, one per lag.
    beta : (d,) array
        Diagonal of the innovation weight matrix B, each entry in (0, 1].
    mu_e : (d,) array
        Innovation means, each in (0, 1).

    Instances are immutable (arrays are read-only) and safe to share
    across threads. Use validate_params to enforce the row-sum constraint.
    """

    coef: tuple
    beta: np.ndarray
    mu_e: np.ndarray

    def __post_init__(self):
        coef = tuple(_freeze(c) for c in self.coef)
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "beta", _freeze(self.beta))
        object.__setattr__(self, "mu_e", _freeze(self.mu_e))

    @property
    def p(self) -> int:
        return len(self.coef)

    @property
    def d(self) -> int:
        return self.coef[0].shape[0]


@dataclass(frozen=True)
class CounterpartParams:
    """Element-wise absolute coefficients; rows are probability vectors.

    row_probs stacks, per row k, the absolute coefficients of every lag
    followed by beta_k: a (d, d*p + 1) matrix whose rows sum to 1.
    """

    abs_coef: tuple
    beta: np.ndarray
    row_probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "abs_coef", tuple(_freeze(c) for c in self.abs_coef))
        object.__setattr__(self, "beta", _freeze(self.beta))
        object.__setattr__(self, "row_probs", _freeze(self.row_probs))


@dataclass(frozen=True)
class StationarityReport:
    """Row-sum and spectral diagnostics of the absolute coefficient matrix."""

    max_rowsum: float
    spectral_radius: float
    is_stationary: bool


@dataclass(frozen=True)
class CompanionForm:
    """VAR(1) companion of a lag-p model, for simulation and diagnostics.

    The first d coordinates of the stacked process reproduce the original
    one; rows d+1..p*d are deterministic shifts (coefficient 1, beta 0),
    which violates the row-sum constraint for a proper parameter set, so
    this is a structural object rather than a GbvarParams.

    Attributes
    ----------
    coef : (p*d, p*d) array
        Signed companion matrix (single lag).
    beta : (p*d,) array
        Original beta padded with zeros on the shift rows.
    mu_e : (p*d,) array
        Original innovation means tiled across the stack (shift rows never
        consume an innovation).
    selector : (d, p*d) array
        J = [I_d, 0]: left-multiplying a stacked state extracts X_t.
    """

    coef: np.ndarray
    beta: np.ndarray
    mu_e: np.ndarray
    selector: np.ndarray

    def __post_init__(self):
        for name in ("coef", "beta", "mu_e", "selector"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))

    @property
    def p(self) -> int:
        return 1

    @property
    def d(self) -> int:
        return self.coef.shape[0]


ParamsLike = Union[GbvarParams, CompanionForm]


def _as_coef_tuple(coef) -> tuple:
    """Accept a single matrix or a sequence of matrices."""
    if isinstance(coef, np.ndarray) and coef.ndim == 2:
        return (coef,)
    if isinstance(coef, Sequence) and coef and np.ndim(coef[0]) == 2:
        return tuple(np.asarray(c, dtype=float) for c in coef)
    arr = np.asarray(coef, dtype=float)
    if arr.ndim == 2:
        return (arr,)
    if arr.ndim == 3:
        return tuple(arr)
    raise ShapeMismatch("coef must be one d x d matrix or a sequence of them")


def validate_params(coef, beta=None, mu_e=None) -> GbvarParams:
    """Check the row-sum constraint and range conditions; return the params.

    Parameters
    ----------
    coef : GbvarParams, matrix, or sequence of matrices
        Either a candidate parameter object, or the raw coefficient
        matrices (then beta and mu_e are required).
    beta, mu_e : array-like, optional
        Required when coef is raw matrices.

    Returns
    -------
    GbvarParams
        Validated, immutable parameters.

    Raises
    ------
    ConstraintViolation, NonpositiveBeta, InnovationMeanOutOfRange,
    ShapeMismatch
    """
    if isinstance(coef, GbvarParams):
        params = coef
    else:
        if beta is None or mu_e is None:
            raise ShapeMismatch("beta and mu_e are required with raw matrices")
        params = GbvarParams(_as_coef_tuple(coef), np.asarray(beta, float),
                             np.asarray(mu_e, float))

    d = params.coef[0].shape[0]
    for q, mat in enumerate(params.coef):
        if mat.shape != (d, d):
            raise ShapeMismatch(f"coef[{q}] has shape {mat.shape}, expected {(d, d)}")
    if params.beta.shape != (d,):
        raise ShapeMismatch(f"beta has shape {params.beta.shape}, expected {(d,)}")
    if params.mu_e.shape != (d,):
        raise ShapeMismatch(f"mu_e has shape {params.mu_e.shape}, expected {(d,)}")

    for k in range(d):
        if not params.beta[k] > 0:
            raise NonpositiveBeta(k + 1)
    for i in range(d):
        if not (0.0 < params.mu_e[i] < 1.0):
            raise InnovationMeanOutOfRange(i + 1)

    abs_sums = sum(np.abs(m).sum(axis=1) for m in params.coef) + params.beta
    for k in range(d):
        residual = abs(abs_sums[k] - 1.0)
        if residual > CONSTRAINT_TOL:
            raise ConstraintViolation(k + 1, residual)
    return params


def counterpart(params: GbvarParams) -> CounterpartParams:
    """Absolute-value matrices and the per-row multinomial probabilities."""
    abs_coef = tuple(np.abs(m) for m in params.coef)
    row_probs = np.concatenate([*(m for m in abs_coef),
                                params.beta[:, None]], axis=1)
    return CounterpartParams(abs_coef, params.beta, row_probs)


def negative_part(A: np.ndarray) -> np.ndarray:
    """|alpha_kl| on entries with alpha_kl < 0, zero elsewhere."""
    return np.where(A < 0, -A, 0.0)


def stationary_mean(params: GbvarParams) -> np.ndarray:
    """Stationary mean of a lag-1 model.

    mu = (I - A)^{-1} (A_neg 1 + B mu_e), where A_neg holds the absolute
    values of the negative entries (sign flips add a constant term).

    Raises
    ------
    SingularSystem
        If (I - A) is numerically singular.
    ShapeMismatch
        If p > 1 (stack to the companion form first).
    """
    if params.p != 1:
        raise ShapeMismatch("stationary_mean requires p = 1")
    A = params.coef[0]
    d = params.d
    rhs = negative_part(A).sum(axis=1) + params.beta * params.mu_e
    M = np.eye(d) - A
    if np.linalg.cond(M) > 1e12:
        raise SingularSystem("(I - A) is numerically singular")
    return np.linalg.solve(M, rhs)


def _abs_companion(params: ParamsLike) -> np.ndarray:
    """Absolute coefficient matrix, in companion form when p > 1."""
    if isinstance(params, CompanionForm):
        return np.abs(params.coef)
    if params.p == 1:
        return np.abs(params.coef[0])
    return np.abs(stack_to_var1(params).coef)


def stationarity_diagnostics(params) -> StationarityReport:
    """Row-sum and spectral-radius diagnostics.

    Accepts validated parameters, a companion form, or a bare fitted
    matrix (which need not satisfy the row-sum constraint). max_rowsum is
    the largest sum of absolute coefficients over rows of the original
    process (shift rows of a companion are excluded: their structural
    row sum is 1 by construction and says nothing about the data).
    """
    if isinstance(params, (GbvarParams, CompanionForm)):
        if isinstance(params, GbvarParams):
            rowsums = sum(np.abs(m).sum(axis=1) for m in params.coef)
        else:
            rowsums = (np.abs(params.coef) @ np.ones(params.d))[
                : params.selector.shape[0]]
        comp = _abs_companion(params)
    else:
        A = np.asarray(params, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ShapeMismatch("fitted matrix must be square")
        rowsums = np.abs(A).sum(axis=1)
        comp = np.abs(A)
    max_rowsum = float(np.max(rowsums)) if rowsums.size else 0.0
    spectral_radius = float(np.max(np.abs(np.linalg.eigvals(comp)))) if comp.size else 0.0
    return StationarityReport(max_rowsum, spectral_radius,
                              bool(max_rowsum < 1.0 and spectral_radius < 1.0))


def stack_to_var1(params: GbvarParams):
    """Companion form of a lag-p model.

    For p = 1 the input is returned unchanged. Otherwise returns a
    CompanionForm of dimension p*d whose first d coordinates evolve
    exactly like the original process, plus the selector J = [I_d, 0].
    """
    if params.p == 1:
        return params
    p, d = params.p, params.d
    D = p * d
    A = np.zeros((D, D))
    for q in range(p):
        A[:d, q * d:(q + 1) * d] = params.coef[q]
    # deterministic shift block: stacked coordinate (q+1, l) copies (q, l)
    A[d:, :D - d] = np.eye(D - d)
    beta = np.concatenate([params.beta, np.zeros(D - d)])
    mu_e = np.tile(params.mu_e, p)
    selector = np.concatenate([np.eye(d), np.zeros((d, D - d))], axis=1)
    return CompanionForm(A, beta, mu_e, selector)


def structural_row_probs(obj: ParamsLike) -> np.ndarray:
    """Per-row multinomial probabilities for any params-like object.

    For a CompanionForm the shift rows put probability 1 on the copied
    coordinate and 0 on the innovation slot.
    """
    if isinstance(obj, GbvarParams):
        return counterpart(obj).row_probs
    return np.concatenate([np.abs(obj.coef), obj.beta[:, None]], axis=1)


# -- JSON (de)serialization ---------------------------------------------------

def params_to_dict(params: GbvarParams, strings: bool = False) -> dict:
    """JSON-ready dict {p, d, coef, beta, mu_e}.

    With strings=True, reals are encoded as repr strings so a writer and
    reader round-trip bit-exactly regardless of JSON float formatting.
    """
    def enc(x):
        return repr(float(x)) if strings else float(x)

    return {
        "p": params.p,
        "d": params.d,
        "coef": [[[enc(v) for v in row] for row in m] for m in params.coef],
        "beta": [enc(v) for v in params.beta],
        "mu_e": [enc(v) for v in params.mu_e],
    }


def params_from_dict(doc: dict) -> GbvarParams:
    """Inverse of params_to_dict; accepts numeric or string-encoded reals."""
    def dec(x):
        return float(x)

    coef = tuple(np.array([[dec(v) for v in row] for row in m]) for m in doc["coef"])
    beta = np.array([dec(v) for v in doc["beta"]])
    mu_e = np.array([dec(v) for v in doc["mu_e"]])
    return validate_params(coef, beta, mu_e)
