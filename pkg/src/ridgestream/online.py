"""Online ridge regression and its variants.

The learner follows the sequential protocol: read the input, predict, read
the outcome, update. ``RidgeState`` is a value; ``ridge_update`` performs the
prediction and the update in one call and returns a fresh state plus the
step record, so callers cannot interleave the two phases incorrectly.
``ridge_run`` drives a whole stream through the selected backend kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import DimensionError, NumericError, ParamError
from .linalg import as_row_matrix, as_vector


@dataclass(frozen=True)
class StepRecord:
    """Everything observable about one protocol step.

    ``q`` is the quadratic form x'A_{t-1}^{-1}x for the linear learners and
    the denominator term d for the kernelized ones; either way
    ``denom = 1 + q`` and ``weighted_sq_loss = sq_loss / denom``. ``x`` is
    None for precomputed-kernel streams, which never materialize inputs.
    """

    y: float
    gamma: float
    q: float
    denom: float
    sq_loss: float
    weighted_sq_loss: float
    x: np.ndarray | None = None
    gamma_clipped: float | None = None
    log_loss: float | None = None


@dataclass(frozen=True)
class RidgeState:
    """Online ridge learner state after ``t`` steps (A_{t} = aI + sum xx')."""

    a: float
    dim: int
    a_inv: np.ndarray
    b: np.ndarray
    t: int = 0
    log_det_acc: float = 0.0
    weighted_loss_acc: float = 0.0
    plain_loss_acc: float = 0.0


def ridge_new(a: float, dim: int) -> RidgeState:
    """Fresh state: A_0 = aI, b_0 = 0, all accumulators zero."""
    if not a > 0.0:
        raise ParamError(f"regularization a must be positive, got {a}")
    if int(dim) < 1:
        raise ParamError(f"dim must be at least 1, got {dim}")
    dim = int(dim)
    return RidgeState(a=float(a), dim=dim, a_inv=np.eye(dim) / a, b=np.zeros(dim))


def ridge_predict(state: RidgeState, x) -> tuple[float, float]:
    """Prediction b'A_{t-1}^{-1}x and quadratic form q = x'A_{t-1}^{-1}x."""
    x = as_vector(x, state.dim)
    v = state.a_inv @ x
    return float(np.dot(state.b, v)), float(np.dot(x, v))


def ridge_update(state: RidgeState, x, y: float) -> tuple[RidgeState, StepRecord]:
    """Predict for ``x``, observe ``y``, and fold the pair into the state."""
    x = as_vector(x, state.dim)
    y = float(y)
    if not np.isfinite(y):
        raise NumericError("outcome must be finite")
    gamma = float(np.dot(state.b, state.a_inv @ x))
    new_inv, q = backend.sm_step(state.a_inv, x)
    if not np.isfinite(q) or q < 0.0:
        raise NumericError("x'A^{-1}x is negative or non-finite; state corrupted")
    q = float(q)
    denom = 1.0 + q
    sq = (y - gamma) ** 2
    wsq = sq / denom
    record = StepRecord(y=y, gamma=gamma, q=q, denom=denom, sq_loss=sq,
                        weighted_sq_loss=wsq, x=x)
    new_state = RidgeState(
        a=state.a,
        dim=state.dim,
        a_inv=new_inv,
        b=state.b + y * x,
        t=state.t + 1,
        log_det_acc=state.log_det_acc + float(np.log1p(q)),
        weighted_loss_acc=state.weighted_loss_acc + wsq,
        plain_loss_acc=state.plain_loss_acc + sq,
    )
    return new_state, record


def clip(gamma: float, bound_y: float) -> float:
    """Truncate a prediction to [-bound_y, bound_y]."""
    if not bound_y > 0.0:
        raise ParamError(f"clip bound must be positive, got {bound_y}")
    return float(min(max(gamma, -bound_y), bound_y))


def vaw_predict(state: RidgeState, x) -> float:
    """VAW prediction b'A_t^{-1}x: the current input is already in the matrix."""
    x = as_vector(x, state.dim)
    new_inv, _ = backend.sm_step(state.a_inv, x)
    return float(np.dot(state.b, new_inv @ x))


@dataclass(frozen=True)
class StreamRun:
    """Per-step outputs of a whole-stream run plus derived accumulators."""

    a: float
    ys: np.ndarray
    gammas: np.ndarray
    qs: np.ndarray

    @property
    def denoms(self) -> np.ndarray:
        return 1.0 + self.qs

    @property
    def sq_losses(self) -> np.ndarray:
        return (self.ys - self.gammas) ** 2

    @property
    def weighted_sq_losses(self) -> np.ndarray:
        return self.sq_losses / self.denoms

    @property
    def weighted_loss(self) -> float:
        return float(np.sum(self.weighted_sq_losses))

    @property
    def plain_loss(self) -> float:
        return float(np.sum(self.sq_losses))

    @property
    def log_det(self) -> float:
        return float(np.sum(np.log1p(self.qs)))

    def clipped_loss(self, bound_y: float) -> float:
        """Plain square loss of the run with predictions clipped to [-Y, Y]."""
        if not bound_y > 0.0:
            raise ParamError(f"clip bound must be positive, got {bound_y}")
        clipped = np.clip(self.gammas, -bound_y, bound_y)
        return float(np.sum((self.ys - clipped) ** 2))

    def records(self, clip_y: float | None = None, xs=None) -> list[StepRecord]:
        """Materialize StepRecords, optionally with clipped predictions."""
        denoms = self.denoms
        sq = self.sq_losses
        weighted = self.weighted_sq_losses
        out = []
        for t in range(self.ys.shape[0]):
            gamma = float(self.gammas[t])
            out.append(StepRecord(
                y=float(self.ys[t]),
                gamma=gamma,
                q=float(self.qs[t]),
                denom=float(denoms[t]),
                sq_loss=float(sq[t]),
                weighted_sq_loss=float(weighted[t]),
                x=None if xs is None else xs[t],
                gamma_clipped=None if clip_y is None else clip(gamma, clip_y),
            ))
        return out


@dataclass(frozen=True)
class RidgeRun(StreamRun):
    """StreamRun of the linear learner; also carries the VAW predictions."""

    xs: np.ndarray = field(default_factory=lambda: np.zeros((0, 1)))
    vaw_gammas: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def records(self, clip_y: float | None = None, xs=None) -> list[StepRecord]:
        return super().records(clip_y, self.xs if xs is None else xs)


def ridge_run(xs, ys, a: float) -> RidgeRun:
    """Run online ridge over the whole stream via the backend kernel."""
    if not a > 0.0:
        raise ParamError(f"regularization a must be positive, got {a}")
    x_mat = as_row_matrix(xs)
    y_vec = np.ascontiguousarray(as_vector(ys))
    if y_vec.shape[0] != x_mat.shape[0]:
        raise DimensionError(f"{x_mat.shape[0]} inputs but {y_vec.shape[0]} outcomes")
    gammas, qs, vaw = backend.ridge_stream(x_mat, y_vec, float(a))
    return RidgeRun(a=float(a), ys=y_vec, gammas=gammas, qs=qs, xs=x_mat,
                    vaw_gammas=vaw)
