"""Incremental kernelized ridge regression and its Bayesian variant.

The model keeps (aI + K_{t-1})^{-1} and grows it one row and column per step
through the Schur complement s = a(1 + d), where d is the predictive
denominator term. A periodic full re-inversion (every ``refactor_every``
steps) caps drift on long streams; memory grows as t^2, so a max-steps guard
fails fast instead of thrashing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import backend
from ._kernels_numpy import NEG_TOL
from .bayes import PredictiveGaussian
from .errors import DimensionError, NumericError, ParamError
from .kernels import KernelSpec, cross, gram, kernel_eval
from .linalg import as_row_matrix, as_vector
from .online import StepRecord, StreamRun

DEFAULT_REFACTOR_EVERY = 256
DEFAULT_MAX_STEPS = 100_000


@dataclass(frozen=True)
class KernelModel:
    """Kernelized online ridge state over the inputs observed so far."""

    spec: KernelSpec
    a: float
    inputs: np.ndarray
    ys: np.ndarray
    g_inv: np.ndarray
    t: int = 0
    log_det_acc: float = 0.0
    weighted_loss_acc: float = 0.0
    plain_loss_acc: float = 0.0
    refactor_every: int = DEFAULT_REFACTOR_EVERY
    max_steps: int = DEFAULT_MAX_STEPS


def kernel_model_new(spec: KernelSpec, a: float,
                     refactor_every: int = DEFAULT_REFACTOR_EVERY,
                     max_steps: int = DEFAULT_MAX_STEPS) -> KernelModel:
    if not a > 0.0:
        raise ParamError(f"regularization a must be positive, got {a}")
    return KernelModel(spec=spec, a=float(a), inputs=np.zeros((0, 0)),
                       ys=np.zeros(0), g_inv=np.zeros((0, 0)),
                       refactor_every=int(refactor_every), max_steps=int(max_steps))


def _predict_parts(model: KernelModel, x):
    x = as_vector(x)
    kxx = kernel_eval(model.spec, x, x)
    if model.t == 0:
        k = np.zeros(0)
        w = np.zeros(0)
        gamma = 0.0
        d = kxx / model.a
    else:
        k = cross(model.spec, model.inputs, x)
        w = model.g_inv @ k
        gamma = float(model.ys @ w)
        d = (kxx - float(k @ w)) / model.a
    if d < -NEG_TOL:
        raise NumericError(
            f"denominator term {d:.3e} is negative beyond tolerance; "
            "kernel matrix is not positive semidefinite"
        )
    if d < 0.0:
        d = 0.0
    return x, gamma, d, w


def krr_predict(model: KernelModel, x) -> tuple[float, float]:
    """Prediction Y'(aI + K)^{-1}k and denominator term d >= 0."""
    _, gamma, d, _ = _predict_parts(model, x)
    return gamma, d


def krr_update(model: KernelModel, x, y: float) -> tuple[KernelModel, StepRecord]:
    """Predict for ``x``, observe ``y``, and grow the model by one input."""
    if model.t >= model.max_steps:
        raise ParamError(f"kernel model exceeded max_steps={model.max_steps}")
    y = float(y)
    if not np.isfinite(y):
        raise NumericError("outcome must be finite")
    x, gamma, d, w = _predict_parts(model, x)
    s = model.a * (1.0 + d)  # Schur complement of the grown system
    if s <= 0.0:
        raise NumericError(f"non-positive Schur complement {s:.3e} at step {model.t}")
    t = model.t
    grown = np.empty((t + 1, t + 1))
    grown[:t, :t] = model.g_inv + np.outer(w / s, w)
    grown[:t, t] = -w / s
    grown[t, :t] = -w / s
    grown[t, t] = 1.0 / s
    inputs = x.reshape(1, -1) if t == 0 else np.vstack([model.inputs, x])
    ys = np.append(model.ys, y)
    if model.refactor_every > 0 and (t + 1) % model.refactor_every == 0:
        grown = np.linalg.inv(model.a * np.eye(t + 1) + gram(model.spec, inputs))
    denom = 1.0 + d
    sq = (y - gamma) ** 2
    wsq = sq / denom
    record = StepRecord(y=y, gamma=gamma, q=d, denom=denom, sq_loss=sq,
                        weighted_sq_loss=wsq, x=x)
    new_model = KernelModel(
        spec=model.spec,
        a=model.a,
        inputs=inputs,
        ys=ys,
        g_inv=grown,
        t=t + 1,
        log_det_acc=model.log_det_acc + float(np.log1p(d)),
        weighted_loss_acc=model.weighted_loss_acc + wsq,
        plain_loss_acc=model.plain_loss_acc + sq,
        refactor_every=model.refactor_every,
        max_steps=model.max_steps,
    )
    return new_model, record


def kbrr_predict(model: KernelModel, x, sigma: float) -> PredictiveGaussian:
    """Kernelized Bayesian ridge density N(gamma, sigma^2 (1 + d))."""
    if not sigma > 0.0:
        raise ParamError(f"noise scale sigma must be positive, got {sigma}")
    gamma, d = krr_predict(model, x)
    return PredictiveGaussian(mean=gamma, variance=sigma * sigma * (1.0 + d))


def rkhs_min_from_gram(kmat: np.ndarray, ys, a: float) -> float:
    """min over the RKHS of sum (y_t - f(x_t))^2 + a ||f||^2 = a Y'(aI+K)^{-1}Y."""
    if not a > 0.0:
        raise ParamError(f"regularization a must be positive, got {a}")
    y = as_vector(ys)
    if y.shape[0] == 0:
        return 0.0
    kmat = np.asarray(kmat, dtype=np.float64)
    sys = a * np.eye(y.shape[0]) + kmat
    try:
        w = scipy.linalg.cho_solve(scipy.linalg.cho_factor(sys, lower=True), y)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError("aI + K failed to factorize") from exc
    return float(a * (y @ w))


def rkhs_min_value(spec: KernelSpec, inputs, ys, a: float) -> float:
    """Regularized RKHS minimum via the representer closed form."""
    y = as_vector(ys)
    if y.shape[0] == 0:
        return 0.0
    return rkhs_min_from_gram(gram(spec, inputs), y, a)


@dataclass(frozen=True)
class KernelRun(StreamRun):
    """Whole-stream kernel run; ``qs`` holds the denominator terms d_t."""

    kmat: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))


def kernel_run_gram(kmat, ys, a: float,
                    refactor_every: int = DEFAULT_REFACTOR_EVERY) -> KernelRun:
    """Drive the incremental learner over a precomputed Gram matrix."""
    if not a > 0.0:
        raise ParamError(f"regularization a must be positive, got {a}")
    kmat = np.ascontiguousarray(np.asarray(kmat, dtype=np.float64))
    y = np.ascontiguousarray(as_vector(ys))
    if kmat.shape != (y.shape[0], y.shape[0]):
        raise DimensionError(
            f"Gram matrix shape {kmat.shape} does not match {y.shape[0]} outcomes"
        )
    gammas, ds, status = backend.kernel_stream(kmat, y, float(a), int(refactor_every))
    if status >= 0:
        raise NumericError(
            f"denominator term went negative beyond tolerance at step {status}; "
            "kernel matrix is not positive semidefinite"
        )
    return KernelRun(a=float(a), ys=y, gammas=gammas, qs=ds, kmat=kmat)


def kernel_run(spec: KernelSpec, xs, ys, a: float,
               refactor_every: int = DEFAULT_REFACTOR_EVERY) -> KernelRun:
    """Assemble the Gram matrix for ``spec`` and drive the learner over it."""
    return kernel_run_gram(gram(spec, as_row_matrix(xs)), ys, a, refactor_every)
