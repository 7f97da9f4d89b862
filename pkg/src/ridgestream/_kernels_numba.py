"""Numba-jitted implementations of the hot stream kernels.

Same contracts as ``_kernels_numpy``; the loops here are written out
explicitly because the per-step matrices are small and the time dimension is
sequential, which is exactly where the interpreter overhead dominates.
Importing this module requires numba (backend.py guards the import).
"""

import numpy as np
from numba import njit

from ._kernels_numpy import NEG_TOL


@njit(cache=True)
def sm_step(a_inv, x):
    n = a_inv.shape[0]
    v = a_inv @ x
    q = np.dot(x, v)
    denom = 1.0 + q
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = a_inv[i, j] - v[i] * v[j] / denom
    for i in range(n):
        for j in range(i + 1, n):
            m = 0.5 * (out[i, j] + out[j, i])
            out[i, j] = m
            out[j, i] = m
    return out, q


@njit(cache=True)
def ridge_stream(xs, ys, a):
    T, n = xs.shape
    a_inv = np.eye(n) / a
    b = np.zeros(n)
    gammas = np.empty(T)
    qs = np.empty(T)
    vaw = np.empty(T)
    for t in range(T):
        x = xs[t]
        v = a_inv @ x
        gammas[t] = np.dot(b, v)
        q = np.dot(x, v)
        qs[t] = q
        denom = 1.0 + q
        for i in range(n):
            for j in range(n):
                a_inv[i, j] -= v[i] * v[j] / denom
        for i in range(n):
            for j in range(i + 1, n):
                m = 0.5 * (a_inv[i, j] + a_inv[j, i])
                a_inv[i, j] = m
                a_inv[j, i] = m
        vaw[t] = np.dot(b, a_inv @ x)
        for i in range(n):
            b[i] += ys[t] * x[i]
    return gammas, qs, vaw


@njit(cache=True)
def kernel_stream(kmat, ys, a, refactor_every):
    T = ys.shape[0]
    g_inv = np.zeros((T, T))
    gammas = np.empty(T)
    ds = np.empty(T)
    w = np.zeros(0)
    for t in range(T):
        kxx = kmat[t, t]
        if t == 0:
            w = np.zeros(0)
            gamma = 0.0
            d = kxx / a
        else:
            w = np.empty(t)
            gamma = 0.0
            kw = 0.0
            for i in range(t):
                acc = 0.0
                for j in range(t):
                    acc += g_inv[i, j] * kmat[t, j]
                w[i] = acc
                gamma += ys[i] * acc
                kw += kmat[t, i] * acc
            d = (kxx - kw) / a
        if -NEG_TOL <= d < 0.0:
            d = 0.0
        gammas[t] = gamma
        ds[t] = d
        if d < 0.0:
            return gammas, ds, t
        s = a * (1.0 + d)
        for i in range(t):
            wi = w[i] / s
            for j in range(t):
                g_inv[i, j] += wi * w[j]
            g_inv[i, t] = -wi
            g_inv[t, i] = -wi
        g_inv[t, t] = 1.0 / s
        if refactor_every > 0 and (t + 1) % refactor_every == 0 and t + 1 < T:
            m = t + 1
            fresh = np.linalg.inv(a * np.eye(m) + np.ascontiguousarray(kmat[:m, :m]))
            for i in range(m):
                for j in range(m):
                    g_inv[i, j] = fresh[i, j]
    return gammas, ds, -1
