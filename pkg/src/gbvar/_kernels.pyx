# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the numpy kernels in gbvar._kernels_py.

simulate_chain reproduces the numpy backend bit-for-bit: slot selection
scans the same float64 cumulative probabilities with the same comparison
(count of entries <= u), so the chosen slot index is identical. The
coordinate-descent solver sweeps rows independently with per-row early
exit, which can differ from the joint numpy schedule by up to the
convergence tolerance.
"""

import numpy as np

from libc.math cimport fabs

BACKEND_NAME = "c"


def simulate_chain(double[:, ::1] cum, long long[::1] slot_src,
                   unsigned char[:, ::1] slot_flip, double[:, ::1] u,
                   unsigned char[:, ::1] e, unsigned char[::1] x0):
    """Propagate the binary state recursion (see gbvar._kernels_py)."""
    cdef Py_ssize_t T = u.shape[0]
    cdef Py_ssize_t d = u.shape[1]
    cdef Py_ssize_t m = cum.shape[1]
    cdef Py_ssize_t pd = x0.shape[0]
    cdef Py_ssize_t t, k, j, idx
    cdef long long src
    cdef double uu
    cdef unsigned char v

    X_arr = np.empty((T, d), dtype=np.uint8)
    lag_arr = np.array(x0, dtype=np.uint8, copy=True)
    new_arr = np.empty(d, dtype=np.uint8)
    cdef unsigned char[:, ::1] X = X_arr
    cdef unsigned char[::1] lag = lag_arr
    cdef unsigned char[::1] newx = new_arr

    for t in range(T):
        for k in range(d):
            uu = u[t, k]
            j = 0
            while j < m - 1 and uu >= cum[k, j]:
                j += 1
            src = slot_src[j]
            if src < 0:
                newx[k] = e[t, k]
            else:
                v = lag[src]
                newx[k] = 1 - v if slot_flip[k, j] else v
        # shift the lag buffer down one time step, newest block first
        for idx in range(pd - 1, d - 1, -1):
            lag[idx] = lag[idx - d]
        for k in range(d):
            lag[k] = newx[k]
            X[t, k] = newx[k]
    return X_arr


def lasso_cd_multi(double[:, ::1] G, double[:, ::1] g, double lam,
                   double[:, ::1] w0, long long max_iter, double tol):
    """Cyclic coordinate descent on the Gram form (see gbvar._kernels_py)."""
    cdef Py_ssize_t r = g.shape[0]
    cdef Py_ssize_t d = g.shape[1]
    cdef Py_ssize_t i, j, l
    cdef long long sweep, sweeps_max = 0
    cdef double cj, wj, delta, maxd, shrunk
    cdef bint all_conv = True, conv

    W_arr = np.array(w0, dtype=np.float64, copy=True)
    q_arr = np.empty(d, dtype=np.float64)
    Gd_arr = np.ascontiguousarray(np.diag(np.asarray(G)).astype(np.float64))
    cdef double[:, ::1] W = W_arr
    cdef double[::1] q = q_arr
    cdef double[::1] Gd = Gd_arr

    for i in range(r):
        for j in range(d):
            if Gd[j] <= 0.0:
                W[i, j] = 0.0
        for l in range(d):
            q[l] = 0.0
        for j in range(d):
            if W[i, j] != 0.0:
                for l in range(d):
                    q[l] += W[i, j] * G[j, l]
        conv = False
        for sweep in range(max_iter):
            maxd = 0.0
            for j in range(d):
                if Gd[j] <= 0.0:
                    continue
                cj = g[i, j] - q[j] + Gd[j] * W[i, j]
                shrunk = fabs(cj) - lam
                if shrunk > 0.0:
                    wj = (shrunk if cj > 0.0 else -shrunk) / Gd[j]
                else:
                    wj = 0.0
                delta = wj - W[i, j]
                if delta != 0.0:
                    for l in range(d):
                        q[l] += delta * G[j, l]
                    W[i, j] = wj
                    if fabs(delta) > maxd:
                        maxd = fabs(delta)
            if maxd < tol:
                conv = True
                if sweep + 1 > sweeps_max:
                    sweeps_max = sweep + 1
                break
        if not conv:
            all_conv = False
            sweeps_max = max_iter
    return W_arr, int(sweeps_max), bool(all_conv)
