"""Vectorized numpy implementations of the hot stream kernels.

This is the fallback path, selected by ``RIDGESTREAM_NUMBA=0`` or when numba
is not importable. The jitted variants in ``_kernels_numba`` mirror these
functions operation for operation; ``tests/test_backends.py`` pins the two
paths against each other.
"""

import numpy as np

# Predictive denominator terms this far below zero signal an invalid kernel
# rather than rounding noise.
NEG_TOL = 1e-9


def sm_step(a_inv, x):
    """One Sherman-Morrison update: ((A + xx')^{-1}, x'A^{-1}x) from A^{-1}."""
    v = a_inv @ x
    q = float(np.dot(x, v))
    out = a_inv - np.outer(v, v) / (1.0 + q)
    out = 0.5 * (out + out.T)  # suppress asymmetry drift over long streams
    return out, q


def ridge_stream(xs, ys, a):
    """Run online ridge regression over a whole stream.

    Returns ``(gammas, qs, vaw_gammas)``: the ridge predictions
    b'A_{t-1}^{-1}x_t, the quadratic forms x_t'A_{t-1}^{-1}x_t, and the VAW
    variant b'A_t^{-1}x_t that folds the current input into the matrix.
    """
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
        q = float(np.dot(x, v))
        qs[t] = q
        a_inv = a_inv - np.outer(v, v) / (1.0 + q)
        a_inv = 0.5 * (a_inv + a_inv.T)
        vaw[t] = np.dot(b, a_inv @ x)
        b = b + ys[t] * x
    return gammas, qs, vaw


def kernel_stream(kmat, ys, a, refactor_every):
    """Incremental kernel ridge over a precomputed Gram matrix.

    Maintains (aI + K_{t-1})^{-1} by Schur-complement growth, re-inverting
    from scratch every ``refactor_every`` steps to cap drift. Returns
    ``(gammas, ds, status)`` where status is -1 on success and otherwise the
    step index at which the denominator term went below -NEG_TOL.
    """
    T = ys.shape[0]
    g_inv = np.zeros((T, T))
    gammas = np.empty(T)
    ds = np.empty(T)
    for t in range(T):
        kxx = kmat[t, t]
        if t == 0:
            w = np.zeros(0)
            gamma = 0.0
            d = kxx / a
        else:
            k = kmat[t, :t]
            w = g_inv[:t, :t] @ k
            gamma = float(np.dot(ys[:t], w))
            d = (kxx - float(np.dot(k, w))) / a
        if -NEG_TOL <= d < 0.0:
            d = 0.0
        gammas[t] = gamma
        ds[t] = d
        if d < 0.0:
            return gammas, ds, t
        s = a * (1.0 + d)  # Schur complement of the grown system
        g_inv[:t, :t] += np.outer(w / s, w)
        g_inv[:t, t] = -w / s
        g_inv[t, :t] = -w / s
        g_inv[t, t] = 1.0 / s
        if refactor_every > 0 and (t + 1) % refactor_every == 0 and t + 1 < T:
            m = t + 1
            g_inv[:m, :m] = np.linalg.inv(a * np.eye(m) + kmat[:m, :m])
    return gammas, ds, -1
