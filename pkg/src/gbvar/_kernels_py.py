"""Pure-numpy versions of the hot kernels.

The compiled module gbvar._kernels implements the same two entry points
with identical numerical semantics; whichever is available is selected in
gbvar._backend. simulate_chain is bit-for-bit identical across backends
(slot selection compares the same float64 values); lasso_cd_multi agrees
to solver tolerance (its sweep schedule differs, see below).
"""

import numpy as np

BACKEND_NAME = "python"


def simulate_chain(cum, slot_src, slot_flip, u, e, x0):
    """Propagate the binary state recursion over T steps.

    Parameters
    ----------
    cum : (d, m) float64
        Cumulative row probabilities, m = d*p + 1, nondecreasing per row.
    slot_src : (m,) int64
        For copy slots, the flattened lag index q*d + l into the state
        buffer (lag q, coordinate l); -1 marks the innovation slot.
    slot_flip : (d, m) uint8
        1 where the slot copies the complement (negative coefficient).
    u : (T, d) float64
        Pre-generated slot-selection uniforms.
    e : (T, d) uint8
        Pre-generated innovations.
    x0 : (p*d,) uint8
        Initial stacked lags [X_0, X_{-1}, ..., X_{1-p}], flattened.

    Returns
    -------
    (T, d) uint8 panel (burn-in not yet discarded).

    Slot selection is the count of cumulative values <= u, clamped to the
    last slot; this matches the compiled scan exactly, tie cases included.
    """
    T, d = u.shape
    m = cum.shape[1]
    pd = x0.shape[0]
    X = np.empty((T, d), dtype=np.uint8)
    lag = x0.astype(np.int64)
    rows = np.arange(d)
    src_clamped = np.maximum(slot_src, 0)
    for t in range(T):
        slots = np.minimum((cum <= u[t][:, None]).sum(axis=1), m - 1)
        src = slot_src[slots]
        flip = slot_flip[rows, slots]
        copied = lag[src_clamped[slots]]
        x = np.where(src < 0, e[t],
                     np.where(flip == 1, 1 - copied, copied)).astype(np.int64)
        X[t] = x
        if pd == d:
            lag = x
        else:
            lag = np.concatenate([x, lag[:-d]])
    return X


def _soft(c, lam):
    return np.sign(c) * np.maximum(np.abs(c) - lam, 0.0)


def lasso_cd_multi(G, g, lam, w0, max_iter, tol):
    """Cyclic coordinate descent on the Gram form, all rows jointly.

    Solves, for each row i of g,
        argmin_w (1/2) w^T G w - g_i^T w + lam |w|_1
    (the Gram reformulation of (1/2d)|y - X w|^2 + lam |w|_1 with
    G = X^T X / d and g_i = X^T y_i / d).

    Parameters
    ----------
    G : (d, d) float64, g : (r, d) float64, w0 : (r, d) warm start.
    lam : float, max_iter : int (full sweeps), tol : float
        Convergence: max coordinate change over a sweep < tol.

    Returns
    -------
    (W, sweeps, converged) : ((r, d) float64, int, bool)
        All rows advance together; sweeps is the number of full sweeps
        run, converged tells whether every row met tol. (The compiled
        backend sweeps rows independently with per-row early exit; both
        schedules land on the same optimum within tol.)
    """
    W = np.array(w0, dtype=float, copy=True)
    r, d = W.shape
    Gd = np.diag(G).copy()
    dead = Gd <= 0.0  # identically-zero columns carry no signal
    W[:, dead] = 0.0
    Q = W @ G
    sweeps = 0
    converged = False
    for _ in range(max_iter):
        sweeps += 1
        max_delta = 0.0
        for j in range(d):
            if dead[j]:
                continue
            cj = g[:, j] - Q[:, j] + Gd[j] * W[:, j]
            wj = _soft(cj, lam) / Gd[j]
            delta = wj - W[:, j]
            step = np.max(np.abs(delta))
            if step > 0.0:
                Q += delta[:, None] * G[j][None, :]
                W[:, j] = wj
                if step > max_delta:
                    max_delta = step
        if max_delta < tol:
            converged = True
            break
    return W, sweeps, converged
