"""Kernel functions over real vector inputs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParamError
from .linalg import as_row_matrix, as_vector

KINDS = ("linear", "rbf", "polynomial")


@dataclass(frozen=True)
class KernelSpec:
    """One of: linear x'z, rbf exp(-gamma ||x-z||^2), polynomial (x'z + offset)^degree."""

    kind: str
    gamma: float | None = None
    degree: int | None = None
    offset: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParamError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "rbf":
            if self.gamma is None or not self.gamma > 0.0:
                raise ParamError(f"rbf kernel needs gamma > 0, got {self.gamma}")
        elif self.kind == "polynomial":
            if self.degree is None or int(self.degree) < 1:
                raise ParamError(f"polynomial kernel needs degree >= 1, got {self.degree}")
            offset = 0.0 if self.offset is None else float(self.offset)
            if offset < 0.0:
                raise ParamError(f"polynomial offset must be >= 0, got {offset}")
            object.__setattr__(self, "degree", int(self.degree))
            object.__setattr__(self, "offset", offset)

    @classmethod
    def from_string(cls, text: str) -> "KernelSpec":
        """Parse e.g. 'linear', 'rbf:gamma=0.5', 'polynomial:degree=2,offset=1'."""
        head, _, tail = text.strip().partition(":")
        kind = head.strip().lower()
        if kind == "poly":
            kind = "polynomial"
        params = {}
        if tail:
            for part in tail.split(","):
                key, _, value = part.partition("=")
                key = key.strip()
                if not key or not value.strip():
                    raise ParamError(f"malformed kernel parameter {part!r} in {text!r}")
                try:
                    params[key] = float(value)
                except ValueError as exc:
                    raise ParamError(f"non-numeric kernel parameter {part!r}") from exc
        gamma = params.pop("gamma", None)
        degree = params.pop("degree", None)
        offset = params.pop("offset", None)
        if params:
            raise ParamError(f"unknown kernel parameters {sorted(params)} in {text!r}")
        return cls(kind=kind, gamma=gamma,
                   degree=None if degree is None else int(degree), offset=offset)

    def __str__(self) -> str:
        if self.kind == "rbf":
            return f"rbf:gamma={self.gamma:g}"
        if self.kind == "polynomial":
            return f"polynomial:degree={self.degree},offset={self.offset:g}"
        return "linear"

    def diagonal_bound(self) -> float | None:
        """sup_x sqrt(K(x, x)) when finite; None for unbounded diagonals."""
        return 1.0 if self.kind == "rbf" else None


def kernel_eval(spec: KernelSpec, x, z) -> float:
    """Evaluate K(x, z); symmetric in its arguments by construction."""
    x = as_vector(x)
    z = as_vector(z, x.shape[0])
    value = float(cross(spec, x.reshape(1, -1), z)[0])
    if not math.isfinite(value):
        raise NumericError(f"kernel value is not finite for {spec}")
    return value


def gram(spec: KernelSpec, xs) -> np.ndarray:
    """Dense kernel matrix K[i, j] = K(x_i, x_j)."""
    m = as_row_matrix(xs)
    inner = m @ m.T
    if spec.kind == "linear":
        out = inner
    elif spec.kind == "polynomial":
        out = (inner + spec.offset) ** spec.degree
    else:
        sq = np.sum(m * m, axis=1)
        dist = np.maximum(sq[:, None] + sq[None, :] - 2.0 * inner, 0.0)
        out = np.exp(-spec.gamma * dist)
    out = 0.5 * (out + out.T)
    if not np.all(np.isfinite(out)):
        raise NumericError(f"kernel matrix has non-finite entries for {spec}")
    return out


def cross(spec: KernelSpec, xs, z) -> np.ndarray:
    """Vector of K(x_i, z) against the stored inputs."""
    m = as_row_matrix(xs)
    z = as_vector(z, m.shape[1])
    inner = m @ z
    if spec.kind == "linear":
        out = inner
    elif spec.kind == "polynomial":
        out = (inner + spec.offset) ** spec.degree
    else:
        dist = np.maximum(np.sum((m - z) ** 2, axis=1), 0.0)
        out = np.exp(-spec.gamma * dist)
    if not np.all(np.isfinite(out)):
        raise NumericError(f"kernel values are not finite for {spec}")
    return out


def tuned_regularization(spec: KernelSpec, horizon: int, c_f: float | None = None) -> float:
    """The a = c_F sqrt(T) choice that makes the clipped regret O(sqrt(T)).

    c_F = sup_x sqrt(K(x, x)) is taken from the kernel when its diagonal is
    bounded (rbf); other kernels need an explicit ``c_f``.
    """
    if horizon < 1:
        raise ParamError(f"horizon must be >= 1, got {horizon}")
    if c_f is None:
        c_f = spec.diagonal_bound()
        if c_f is None:
            raise ParamError(
                f"kernel {spec} has an unbounded diagonal; supply c_f explicitly"
            )
    if not c_f > 0.0:
        raise ParamError(f"c_f must be positive, got {c_f}")
    return float(c_f) * math.sqrt(horizon)
