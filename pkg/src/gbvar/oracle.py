"""Exact finite-state reference for small lag-1 models.

A d-dimensional binary process is a Markov chain on {0,1}^d. With
independent Bernoulli innovations the coordinates are conditionally
independent given the previous state, so the 2^d x 2^d transition matrix
factorizes over coordinates and can be enumerated exactly. This module is
the brute-force ground truth the estimation stack is tested against.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLarge, NotIrreducible, ShapeMismatch
from .model import GbvarParams, negative_part

MAX_DIM = 12


def state_table(d: int) -> np.ndarray:
    """(2^d, d) matrix of states; coordinate k is bit k of the row index."""
    idx = np.arange(2 ** d, dtype=np.int64)
    return ((idx[:, None] >> np.arange(d)[None, :]) & 1).astype(float)


def conditional_means(params: GbvarParams) -> np.ndarray:
    """P(X_{t,k} = 1 | X_{t-1} = x) for every state x, coordinate k.

    Positive coefficients copy x_l, negative ones copy 1 - x_l, and the
    innovation slot contributes beta_k * mu_e_k.
    """
    if params.p != 1:
        raise ShapeMismatch("exact chain requires p = 1")
    A = params.coef[0]
    S = state_table(params.d)
    Apos = np.where(A > 0, A, 0.0)
    Aneg = negative_part(A)
    return S @ Apos.T + (1.0 - S) @ Aneg.T + params.beta * params.mu_e


@dataclass(frozen=True)
class ExactChain:
    """Enumerated chain: states, transition matrix, stationary law.

    cond[x, k] is the conditional success probability of coordinate k from
    state x; transition[x, y] the full state-to-state probability.
    """

    d: int
    states: np.ndarray
    cond: np.ndarray
    transition: np.ndarray
    stationary: np.ndarray


@dataclass(frozen=True)
class ExactMoments:
    mu: np.ndarray
    sigma0: np.ndarray
    sigma1: np.ndarray


def _stationary_power(P: np.ndarray, tol: float = 1e-14,
                      max_iter: int = 1_000_000) -> np.ndarray | None:
    pi = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(max_iter):
        nxt = pi @ P
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt / nxt.sum()
        pi = nxt
    return None


def _stationary_solve(P: np.ndarray) -> np.ndarray:
    """Solve pi (P - I) = 0 with a normalization row appended."""
    m = P.shape[0]
    M = np.concatenate([P.T - np.eye(m), np.ones((1, m))], axis=0)
    rhs = np.zeros(m + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return pi / pi.sum()


def exact_transition_matrix(params: GbvarParams,
                            innovation: str = "independent") -> ExactChain:
    """Enumerate the exact chain of a small lag-1 model.

    Parameters
    ----------
    params : GbvarParams
        Lag-1 parameters with d <= 12.
    innovation : str
        Only "independent" is supported: the product-form transition
        requires independent innovation coordinates.

    Raises
    ------
    DimensionTooLarge, ShapeMismatch, ValueError
    """
    if innovation != "independent":
        raise ValueError("exact chain supports independent innovations only")
    d = params.d
    if d > MAX_DIM:
        raise DimensionTooLarge(f"d = {d} exceeds the enumeration limit {MAX_DIM}")
    S = state_table(d)
    cond = conditional_means(params)
    m = 2 ** d
    P = np.ones((m, m))
    for k in range(d):
        # multiply in coordinate k's factor: cond if bit k of y is set
        P *= cond[:, k][:, None] * S[:, k][None, :] \
            + (1.0 - cond[:, k])[:, None] * (1.0 - S[:, k])[None, :]
    pi = _stationary_power(P)
    if pi is None:
        pi = _stationary_solve(P)
    return ExactChain(d, S, cond, P, pi)


def exact_stationary_moments(chain: ExactChain) -> ExactMoments:
    """Stationary mean, lag-0 and lag-1 autocovariance of the exact chain.

    The lag-1 cross moment uses the conditional coordinate means:
    E[X_{t+1} X_t^T] = sum_x pi(x) E[X_{t+1}|x] x^T.

    Raises
    ------
    NotIrreducible
        If some conditional probability is 0 or 1 (the chain may then
        have transient or absorbing structure).
    """
    if chain.cond.min() <= 0.0 or chain.cond.max() >= 1.0:
        raise NotIrreducible("a conditional probability hit 0 or 1")
    pi, S = chain.stationary, chain.states
    mu = pi @ S
    weighted = pi[:, None] * S
    sigma0 = S.T @ weighted - np.outer(mu, mu)
    sigma1 = chain.cond.T @ weighted - np.outer(mu, mu)
    return ExactMoments(mu, sigma0, sigma1)
