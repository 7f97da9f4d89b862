"""Two-sided evaluation of every guarantee the learners carry.

Each ``verify_*`` function computes the left side from an online run and the
right side from a batch factorization, deliberately through disjoint code
paths, then packages both into a ``BoundReport``. Equalities pass when the
gap is below a relative tolerance (scaled by max(1, |rhs|)); inequalities
pass when the left side does not exceed the right by more than an absolute
tolerance. Asymptotic statements are reported as informational trends, never
asserted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bayes import brr_cumulative_log_loss
from .errors import InputError, ParamError
from .kernel_online import kernel_run_gram, rkhs_min_from_gram
from .kernels import KernelSpec, gram
from .linalg import as_row_matrix, as_vector, batch_ridge, spd_logdet
from .online import ridge_run

EQUALITY_TOL = 1e-6
UPPER_TOL = 1e-7
DET_TOL = 1e-7


@dataclass(frozen=True)
class BoundReport:
    """Evaluated guarantee: both sides, the gap, and the pass verdict."""

    name: str
    lhs: float
    rhs: float
    gap: float
    relation: str  # "equality" | "upper_bound"
    tolerance: float
    passed: bool
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "relation": self.relation,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "meta": dict(self.meta),
        }


@dataclass(frozen=True)
class TrendReport:
    """Informational trend (no pass/fail): finite-horizon view of a limit claim."""

    name: str
    values: np.ndarray
    tail_start: int
    tail_max: float
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "informational": True,
            "tail_start": self.tail_start,
            "tail_max": self.tail_max,
            "values": [float(v) for v in self.values],
            "meta": dict(self.meta),
        }


def _equality(name, lhs, rhs, tolerance, meta) -> BoundReport:
    gap = abs(lhs - rhs)
    passed = gap <= tolerance * max(1.0, abs(rhs))
    return BoundReport(name=name, lhs=float(lhs), rhs=float(rhs), gap=float(gap),
                       relation="equality", tolerance=tolerance, passed=bool(passed),
                       meta=meta)


def _upper_bound(name, lhs, rhs, tolerance, meta) -> BoundReport:
    gap = rhs - lhs
    passed = lhs <= rhs + tolerance
    return BoundReport(name=name, lhs=float(lhs), rhs=float(rhs), gap=float(gap),
                       relation="upper_bound", tolerance=tolerance, passed=bool(passed),
                       meta=meta)


def _prepare(xs, ys):
    x_mat = as_row_matrix(xs)
    y_vec = as_vector(ys)
    return x_mat, y_vec


def _linear_meta(x_mat, a, **extra) -> dict:
    meta = {"a": float(a), "T": int(x_mat.shape[0]), "n": int(x_mat.shape[1])}
    meta.update(extra)
    return meta


def _design_logdet(x_mat, a: float) -> float:
    n = x_mat.shape[1]
    return spd_logdet(np.eye(n) + (x_mat.T @ x_mat) / a)


def verify_thm1(xs, ys, a: float, tolerance: float = EQUALITY_TOL) -> BoundReport:
    """Online weighted square loss vs the regularized batch minimum (equality)."""
    x_mat, y_vec = _prepare(xs, ys)
    if x_mat.shape[0] == 0:
        raise InputError("the weighted-loss identity needs a nonempty stream")
    run = ridge_run(x_mat, y_vec, a)
    _, rhs = batch_ridge(x_mat, y_vec, a)
    return _equality("thm1", run.weighted_loss, rhs, tolerance, _linear_meta(x_mat, a))


def verify_cor1(xs, ys, a: float, bound_y: float,
                tolerance: float = UPPER_TOL) -> BoundReport:
    """Clipped plain loss vs batch minimum + 4Y^2 ln det (upper bound)."""
    if not bound_y > 0.0:
        raise ParamError(f"bound_y must be positive, got {bound_y}")
    x_mat, y_vec = _prepare(xs, ys)
    if y_vec.size and float(np.abs(y_vec).max()) > bound_y:
        raise InputError(f"outcomes exceed the declared bound |y| <= {bound_y}")
    run = ridge_run(x_mat, y_vec, a)
    _, batch_min = batch_ridge(x_mat, y_vec, a)
    rhs = batch_min + 4.0 * bound_y ** 2 * _design_logdet(x_mat, a)
    meta = _linear_meta(x_mat, a, Y=float(bound_y))
    return _upper_bound("cor1", run.clipped_loss(bound_y), rhs, tolerance, meta)


def verify_cor2(xs, ys, a: float, bound_z: float | None = None,
                tolerance: float = UPPER_TOL) -> BoundReport:
    """Plain loss vs (1 + Z^2/a) times the batch minimum (upper bound)."""
    x_mat, y_vec = _prepare(xs, ys)
    norms = np.linalg.norm(x_mat, axis=1) if x_mat.shape[0] else np.zeros(0)
    realized = float(norms.max()) if norms.size else 0.0
    if bound_z is None:
        bound_z = realized
    elif realized > bound_z:
        raise InputError(f"inputs exceed the declared bound ||x||_2 <= {bound_z}")
    run = ridge_run(x_mat, y_vec, a)
    _, batch_min = batch_ridge(x_mat, y_vec, a)
    rhs = (1.0 + bound_z ** 2 / a) * batch_min
    meta = _linear_meta(x_mat, a, Z=float(bound_z))
    return _upper_bound("cor2", run.plain_loss, rhs, tolerance, meta)


def verify_det_identity(xs, ys, a: float, tolerance: float = DET_TOL) -> BoundReport:
    """Accumulated sum ln(1+q_t) vs dense ln det(I + (1/a) X'X) (equality)."""
    x_mat, y_vec = _prepare(xs, ys)
    run = ridge_run(x_mat, y_vec, a)
    rhs = _design_logdet(x_mat, a)
    return _equality("det_identity", run.log_det, rhs, tolerance, _linear_meta(x_mat, a))


def verify_det_bound(xs, ys, a: float, x_inf: float | None = None,
                     tolerance: float = UPPER_TOL) -> BoundReport:
    """Online log-det vs n ln(1 + T X^2 / a) for sup-norm bounded inputs."""
    x_mat, y_vec = _prepare(xs, ys)
    realized = float(np.abs(x_mat).max()) if x_mat.size else 0.0
    if x_inf is None:
        x_inf = realized
    elif realized > x_inf:
        raise InputError(f"inputs exceed the declared bound ||x||_inf <= {x_inf}")
    run = ridge_run(x_mat, y_vec, a)
    T, n = x_mat.shape
    rhs = n * float(np.log1p(T * x_inf ** 2 / a))
    meta = _linear_meta(x_mat, a, X=float(x_inf))
    return _upper_bound("det_bound", run.log_det, rhs, tolerance, meta)


def verify_thm2(xs, ys, a: float, sigma: float,
                tolerance: float = EQUALITY_TOL) -> BoundReport:
    """Bayesian ridge cumulative log loss vs regularized expert minimum plus
    half the log determinant (equality)."""
    if not sigma > 0.0:
        raise ParamError(f"sigma must be positive, got {sigma}")
    x_mat, y_vec = _prepare(xs, ys)
    run = ridge_run(x_mat, y_vec, a)
    lhs = brr_cumulative_log_loss(run.records(), sigma)
    _, batch_min = batch_ridge(x_mat, y_vec, a)
    T = x_mat.shape[0]
    rhs = (0.5 * T * np.log(2.0 * np.pi * sigma * sigma)
           + batch_min / (2.0 * sigma * sigma)
           + 0.5 * _design_logdet(x_mat, a))
    meta = _linear_meta(x_mat, a, sigma=float(sigma))
    return _equality("thm2", lhs, rhs, tolerance, meta)


def _kernel_meta(kmat, a, spec, **extra) -> dict:
    meta = {"a": float(a), "T": int(kmat.shape[0]),
            "kernel": str(spec) if spec is not None else "precomputed"}
    meta.update(extra)
    return meta


def _kernel_logdet(kmat, a: float) -> float:
    T = kmat.shape[0]
    return spd_logdet(np.eye(T) + kmat / a) if T else 0.0


def verify_thm3(kmat, ys, a: float, spec: KernelSpec | None = None,
                refactor_every: int = 256,
                tolerance: float = EQUALITY_TOL) -> BoundReport:
    """Kernel weighted square loss vs the RKHS regularized minimum (equality)."""
    kmat = np.asarray(kmat, dtype=np.float64)
    y_vec = as_vector(ys)
    if y_vec.shape[0] == 0:
        raise InputError("the kernel weighted-loss identity needs a nonempty stream")
    run = kernel_run_gram(kmat, y_vec, a, refactor_every)
    rhs = rkhs_min_from_gram(kmat, y_vec, a)
    return _equality("thm3", run.weighted_loss, rhs, tolerance,
                     _kernel_meta(kmat, a, spec))


def verify_thm4(kmat, ys, a: float, sigma: float, spec: KernelSpec | None = None,
                refactor_every: int = 256,
                tolerance: float = EQUALITY_TOL) -> BoundReport:
    """Kernelized Bayesian ridge log loss vs RKHS minimum plus half log det."""
    if not sigma > 0.0:
        raise ParamError(f"sigma must be positive, got {sigma}")
    kmat = np.asarray(kmat, dtype=np.float64)
    y_vec = as_vector(ys)
    run = kernel_run_gram(kmat, y_vec, a, refactor_every)
    lhs = brr_cumulative_log_loss(run.records(), sigma)
    T = y_vec.shape[0]
    rhs = (0.5 * T * np.log(2.0 * np.pi * sigma * sigma)
           + rkhs_min_from_gram(kmat, y_vec, a) / (2.0 * sigma * sigma)
           + 0.5 * _kernel_logdet(kmat, a))
    meta = _kernel_meta(kmat, a, spec, sigma=float(sigma))
    return _equality("thm4", lhs, rhs, tolerance, meta)


def verify_cor5(kmat, ys, a: float, bound_y: float, spec: KernelSpec | None = None,
                refactor_every: int = 256,
                tolerance: float = UPPER_TOL) -> BoundReport:
    """Clipped kernel plain loss vs RKHS minimum + 4Y^2 ln det(I + K/a)."""
    if not bound_y > 0.0:
        raise ParamError(f"bound_y must be positive, got {bound_y}")
    kmat = np.asarray(kmat, dtype=np.float64)
    y_vec = as_vector(ys)
    if y_vec.size and float(np.abs(y_vec).max()) > bound_y:
        raise InputError(f"outcomes exceed the declared bound |y| <= {bound_y}")
    run = kernel_run_gram(kmat, y_vec, a, refactor_every)
    rhs = (rkhs_min_from_gram(kmat, y_vec, a)
           + 4.0 * bound_y ** 2 * _kernel_logdet(kmat, a))
    meta = _kernel_meta(kmat, a, spec, Y=float(bound_y))
    return _upper_bound("cor5", run.clipped_loss(bound_y), rhs, tolerance, meta)


def verify_kernel_det_identity(kmat, ys, a: float, spec: KernelSpec | None = None,
                               refactor_every: int = 256,
                               tolerance: float = DET_TOL) -> BoundReport:
    """Accumulated sum ln(1+d_t) vs dense ln det(I + K/a) (equality)."""
    kmat = np.asarray(kmat, dtype=np.float64)
    y_vec = as_vector(ys)
    run = kernel_run_gram(kmat, y_vec, a, refactor_every)
    return _equality("det_identity", run.log_det, _kernel_logdet(kmat, a),
                     tolerance, _kernel_meta(kmat, a, spec))


def verify_trend_cor3(xs, ys, a: float, tail_fraction: float = 0.1) -> TrendReport:
    """Informational: the q_t sequence and its maximum over the final steps.

    The underlying claim is asymptotic (q_t -> 0 for bounded inputs), so no
    finite run can assert it; the trend is reported for inspection only.
    """
    x_mat, y_vec = _prepare(xs, ys)
    run = ridge_run(x_mat, y_vec, a)
    T = x_mat.shape[0]
    tail_start = max(0, T - max(1, int(np.ceil(tail_fraction * T)))) if T else 0
    tail_max = float(run.qs[tail_start:].max()) if T else 0.0
    meta = _linear_meta(x_mat, a, tail_fraction=tail_fraction)
    return TrendReport(name="cor3_trend", values=run.qs, tail_start=tail_start,
                       tail_max=tail_max, meta=meta)


def trend_from_run(run, a: float, tail_fraction: float = 0.1,
                   meta: dict | None = None) -> TrendReport:
    """Cor-3 style trend from an existing run (kernel runs report d_t)."""
    T = run.qs.shape[0]
    tail_start = max(0, T - max(1, int(np.ceil(tail_fraction * T)))) if T else 0
    tail_max = float(run.qs[tail_start:].max()) if T else 0.0
    base = {"a": float(a), "T": int(T), "tail_fraction": tail_fraction}
    if meta:
        base.update(meta)
    return TrendReport(name="cor3_trend", values=run.qs, tail_start=tail_start,
                       tail_max=tail_max, meta=base)


def qazaz_trajectories(xs, a: float, probes) -> np.ndarray:
    """v'A_t^{-1}v for each probe vector at every t = 0..T.

    Each row is nonincreasing in t (the matrices grow in the Loewner order),
    which is the monotonicity behind the no-regret corollary.
    """
    x_mat = as_row_matrix(xs)
    probe_mat = as_row_matrix(probes, x_mat.shape[1])
    if not a > 0.0:
        raise ParamError(f"regularization a must be positive, got {a}")
    T, n = x_mat.shape
    a_inv = np.eye(n) / a
    out = np.empty((probe_mat.shape[0], T + 1))
    out[:, 0] = np.einsum("ij,jk,ik->i", probe_mat, a_inv, probe_mat)
    for t in range(T):
        x = x_mat[t]
        v = a_inv @ x
        a_inv = a_inv - np.outer(v, v) / (1.0 + float(x @ v))
        a_inv = 0.5 * (a_inv + a_inv.T)
        out[:, t + 1] = np.einsum("ij,jk,ik->i", probe_mat, a_inv, probe_mat)
    return out
