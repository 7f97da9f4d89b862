"""Dense linear-algebra primitives shared by every learner.

Rank-one inverse updates, regularized least squares through symmetric
(Cholesky) factorizations, the Gaussian quadratic integral, and the running
log-determinant identity. Vectors and symmetric matrices are plain float64
numpy arrays; the ``as_*`` helpers enforce the invariants once at the API
boundary.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from . import backend
from .errors import DimensionError, NumericError, ParamError

SYM_RTOL = 1e-12


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float64 array, optionally of length ``dim``."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"expected a vector of dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise NumericError("vector contains non-finite entries")
    return v


def as_sym_matrix(m, dim: int | None = None) -> np.ndarray:
    """Coerce ``m`` to a finite symmetric 2-D float64 array."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionError(f"expected a {dim}x{dim} matrix, got {a.shape[0]}x{a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise NumericError("matrix contains non-finite entries")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if a.size and float(np.abs(a - a.T).max()) > SYM_RTOL * scale:
        raise NumericError("matrix is not symmetric")
    return a


def as_row_matrix(xs, dim: int | None = None) -> np.ndarray:
    """Stack a sequence of input vectors into a contiguous (T, n) array.

    ``dim`` is required only when the sequence is empty and the width cannot
    be inferred.
    """
    if isinstance(xs, np.ndarray) and xs.ndim == 2:
        m = np.ascontiguousarray(xs, dtype=np.float64)
    else:
        rows = [as_vector(x) for x in xs]
        if not rows:
            if dim is None:
                raise DimensionError("empty input sequence needs an explicit dim")
            return np.zeros((0, dim))
        m = np.ascontiguousarray(np.vstack(rows))
    if dim is not None and m.shape[0] and m.shape[1] != dim:
        raise DimensionError(f"expected row width {dim}, got {m.shape[1]}")
    if not np.all(np.isfinite(m)):
        raise NumericError("input matrix contains non-finite entries")
    return m


def _cholesky(a: np.ndarray):
    try:
        return scipy.linalg.cho_factor(a, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError("matrix is not positive definite") from exc


def solve_spd(a, rhs) -> np.ndarray:
    """Solve a x = rhs for symmetric positive definite ``a`` via Cholesky."""
    return scipy.linalg.cho_solve(_cholesky(as_sym_matrix(a)), np.asarray(rhs, dtype=np.float64))


def spd_logdet(a) -> float:
    """ln det of a symmetric positive definite matrix via Cholesky."""
    factor, _ = _cholesky(as_sym_matrix(a))
    return float(2.0 * np.sum(np.log(np.diag(factor))))


def sherman_morrison_update(a_inv, x) -> tuple[np.ndarray, float]:
    """Rank-one update of an inverse.

    Given ``a_inv`` = A^{-1} for a symmetric positive definite A and a vector
    ``x``, returns ``((A + xx')^{-1}, q)`` where q = x'A^{-1}x >= 0. The
    result is re-symmetrized so that repeated updates do not drift. A zero
    ``x`` is legal and leaves the inverse unchanged with q = 0.
    """
    a_inv = as_sym_matrix(a_inv)
    x = as_vector(x, a_inv.shape[0])
    out, q = backend.sm_step(a_inv, x)
    if not np.isfinite(q) or q < 0.0:
        raise NumericError("x'A^{-1}x is negative or non-finite; matrix not positive definite")
    return out, float(q)


def batch_ridge(xs, ys, a: float, dim: int | None = None) -> tuple[np.ndarray, float]:
    """Solve min over theta of sum_t (y_t - theta'x_t)^2 + a * ||theta||^2.

    Returns ``(theta, min_value)``. The solve goes through a Cholesky
    factorization of aI + X'X, a computational path independent of the
    online learners' incremental inverses. Empty data gives theta = 0 and
    min_value = 0 (``dim`` must then be supplied).
    """
    if not a > 0.0:
        raise ParamError(f"regularization a must be positive, got {a}")
    x_mat = as_row_matrix(xs, dim)
    y_vec = as_vector(ys)
    if y_vec.shape[0] != x_mat.shape[0]:
        raise DimensionError(
            f"{x_mat.shape[0]} inputs but {y_vec.shape[0]} outcomes"
        )
    n = x_mat.shape[1]
    if x_mat.shape[0] == 0:
        return np.zeros(n), 0.0
    gram = a * np.eye(n) + x_mat.T @ x_mat
    theta = scipy.linalg.cho_solve(_cholesky(gram), x_mat.T @ y_vec)
    resid = y_vec - x_mat @ theta
    value = float(resid @ resid + a * (theta @ theta))
    return theta, value


def gaussian_quadratic_integral(a_mat, b, c: float) -> float:
    """ln of the integral over R^n of exp(-(theta'A theta + b'theta + c)).

    Requires A symmetric positive definite. The closed form is
    -W0 + (n/2) ln(pi) - (1/2) ln det A with W0 = min_theta W(theta)
    = c - b'A^{-1}b / 4.
    """
    a_mat = as_sym_matrix(a_mat)
    b = as_vector(b, a_mat.shape[0])
    factor = _cholesky(a_mat)
    half_logdet = float(np.sum(np.log(np.diag(factor[0]))))
    w0 = float(c) - float(b @ scipy.linalg.cho_solve(factor, b)) / 4.0
    n = a_mat.shape[0]
    return -w0 + 0.5 * n * np.log(np.pi) - half_logdet


def log_det_from_products(qs) -> float:
    """Sum of ln(1 + q_t) over per-step quadratic forms.

    When the q_t come from an online ridge run this equals
    ln det(I + (1/a) sum_t x_t x_t').
    """
    q = np.asarray(qs, dtype=np.float64)
    if q.size:
        if not np.all(np.isfinite(q)):
            raise NumericError("quadratic forms must be finite")
        if float(q.min()) < 0.0:
            raise NumericError("quadratic forms must be nonnegative")
    return float(np.sum(np.log1p(q)))
