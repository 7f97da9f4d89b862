"""Stream sources and serialization: CSV ingestion, synthetic generation,
and step-log emission.

All floats are written with 17 significant digits, which round-trips IEEE
doubles exactly; re-loading a dumped stream therefore reproduces the exact
predictions. Synthetic streams come from numpy's seeded PCG64 generator, so
the same seed gives the same stream on every platform.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParamError, ParseError
from .linalg import as_vector

X_DISTS = ("cube", "sphere")
ADVERSARIAL = ("constant_x", "alternating_sign")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"row {row}, column {col}: {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ParseError(f"row {row}, column {col}: {text!r} is not finite")
    return value


def load_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Load an ordered (x, y) stream from a header-bearing CSV file.

    The header must be ``f1,...,fn,y``; every cell must parse as a finite
    real. Row order is preserved (the protocol is sequential).
    """
    path = Path(path)
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        n = len(header) - 1
        expected = [f"f{i + 1}" for i in range(n)] + ["y"]
        if n < 1 or header != expected:
            raise ParseError(
                f"{path}: header must be f1,...,fn,y; got {','.join(header)}"
            )
        xs, ys = [], []
        for row_idx, row in enumerate(reader, start=2):
            if len(row) != n + 1:
                raise ParseError(
                    f"{path}: row {row_idx} has {len(row)} cells, expected {n + 1}"
                )
            values = [_parse_cell(cell, row_idx, col + 1) for col, cell in enumerate(row)]
            xs.append(values[:n])
            ys.append(values[n])
    x_mat = np.array(xs, dtype=np.float64).reshape(len(xs), n)
    return x_mat, np.array(ys, dtype=np.float64)


def write_csv(path, xs, ys) -> None:
    """Write a stream in the format load_csv reads back, bit-exactly."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    n = xs.shape[1]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"f{i + 1}" for i in range(n)] + ["y"])
        for x, y in zip(xs, ys):
            writer.writerow([_fmt(v) for v in x] + [_fmt(y)])


def load_kernel_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Load a precomputed-kernel stream with ragged rows.

    Row t (1-based, no header) carries K(x_t, x_1..x_{t-1}), then K(x_t, x_t),
    then y_t, so it has t+1 cells. Returns the assembled symmetric Gram
    matrix and the outcome vector. This is how arbitrary (non-vector) input
    sets reach the kernel learners.
    """
    path = Path(path)
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        for row_idx, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != row_idx + 1:
                raise ParseError(
                    f"{path}: row {row_idx} has {len(row)} cells, expected {row_idx + 1} "
                    "(K against earlier inputs, K(x,x), y)"
                )
            rows.append([_parse_cell(cell, row_idx, col + 1) for col, cell in enumerate(row)])
    T = len(rows)
    kmat = np.zeros((T, T))
    ys = np.zeros(T)
    for t, values in enumerate(rows):
        kmat[t, :t] = values[:t]
        kmat[:t, t] = values[:t]
        kmat[t, t] = values[t]
        ys[t] = values[t + 1]
    return kmat, ys


def write_kernel_csv(path, kmat, ys) -> None:
    """Write a Gram matrix plus outcomes in the ragged row format."""
    kmat = np.asarray(kmat, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        for t in range(ys.shape[0]):
            row = [_fmt(v) for v in kmat[t, :t]] + [_fmt(kmat[t, t]), _fmt(ys[t])]
            writer.writerow(row)


STEP_LOG_COLUMNS = ("t", "y", "gamma", "gamma_clipped", "q_or_d", "denom",
                    "sq_loss", "weighted_sq_loss", "log_loss")


def write_step_log(path, records) -> None:
    """Write per-step records as CSV; optional fields are left empty."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(STEP_LOG_COLUMNS)
        for t, r in enumerate(records, start=1):
            writer.writerow([
                t,
                _fmt(r.y),
                _fmt(r.gamma),
                "" if r.gamma_clipped is None else _fmt(r.gamma_clipped),
                _fmt(r.q),
                _fmt(r.denom),
                _fmt(r.sq_loss),
                _fmt(r.weighted_sq_loss),
                "" if r.log_loss is None else _fmt(r.log_loss),
            ])


@dataclass(frozen=True)
class SyntheticSpec:
    """Linear-model stream generator: y = theta'x + Gaussian noise.

    ``x_dist`` draws inputs either uniformly from the cube [-scale, scale]^n
    (so the sup-norm bound is exact) or uniformly from the sphere of radius
    ``scale`` (so the 2-norm equals scale exactly). Adversarial variants
    reuse a single direction: ``constant_x`` repeats it, ``alternating_sign``
    flips its sign every step.
    """

    n: int
    T: int
    theta_star: np.ndarray | str = "random"
    noise_sigma: float = 0.0
    x_dist: str = "cube"
    x_scale: float = 1.0
    adversarial: str | None = None

    def __post_init__(self):
        if int(self.n) < 1:
            raise ParamError(f"n must be >= 1, got {self.n}")
        if int(self.T) < 0:
            raise ParamError(f"T must be >= 0, got {self.T}")
        if self.noise_sigma < 0.0:
            raise ParamError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.x_dist not in X_DISTS:
            raise ParamError(f"x_dist must be one of {X_DISTS}, got {self.x_dist!r}")
        if not self.x_scale > 0.0:
            raise ParamError(f"x_scale must be positive, got {self.x_scale}")
        if self.adversarial is not None and self.adversarial not in ADVERSARIAL:
            raise ParamError(
                f"adversarial must be one of {ADVERSARIAL}, got {self.adversarial!r}"
            )
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "T", int(self.T))
        if not isinstance(self.theta_star, str):
            object.__setattr__(self, "theta_star", as_vector(self.theta_star, self.n))
        elif self.theta_star != "random":
            raise ParamError(f"theta_star must be 'random' or a vector, got {self.theta_star!r}")

    @classmethod
    def from_string(cls, text: str) -> "SyntheticSpec":
        """Parse e.g. 'n=3,T=100,x=cube:1.0,theta=random,noise=0.5'.

        Explicit theta entries are colon-separated: ``theta=0.5:-1.2``.
        """
        fields: dict = {}
        for part in text.split(","):
            key, sep, value = part.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key or not value:
                raise ParamError(f"malformed synthetic field {part!r} in {text!r}")
            if key == "n":
                fields["n"] = int(value)
            elif key in ("T", "t"):
                fields["T"] = int(value)
            elif key == "noise":
                fields["noise_sigma"] = float(value)
            elif key == "x":
                dist, _, scale = value.partition(":")
                fields["x_dist"] = dist.strip()
                if scale.strip():
                    fields["x_scale"] = float(scale)
            elif key == "theta":
                if value == "random":
                    fields["theta_star"] = "random"
                else:
                    fields["theta_star"] = np.array([float(v) for v in value.split(":")])
            elif key == "adversarial":
                fields["adversarial"] = value
            else:
                raise ParamError(f"unknown synthetic field {key!r} in {text!r}")
        if "n" not in fields or "T" not in fields:
            raise ParamError(f"synthetic spec needs at least n= and T=: {text!r}")
        return cls(**fields)


def generate_synthetic(spec: SyntheticSpec, seed: int) -> tuple[np.ndarray, np.ndarray, dict]:
    """Deterministically generate a stream from the spec.

    Returns (xs, ys, meta); meta records the realized theta and the exact
    norm bounds the stream satisfies.
    """
    rng = np.random.default_rng(int(seed))
    n, T = spec.n, spec.T
    theta = (rng.standard_normal(n) if isinstance(spec.theta_star, str)
             else np.array(spec.theta_star, dtype=np.float64))

    if spec.adversarial is None:
        draws = T
    else:
        draws = min(T, 1)
    if spec.x_dist == "cube":
        base = rng.uniform(-spec.x_scale, spec.x_scale, size=(draws, n))
    else:
        raw = rng.standard_normal((draws, n))
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        base = spec.x_scale * raw / norms
    if spec.adversarial == "constant_x":
        xs = np.repeat(base, T, axis=0) if T else np.zeros((0, n))
    elif spec.adversarial == "alternating_sign":
        signs = np.where(np.arange(T) % 2 == 0, 1.0, -1.0)
        xs = signs[:, None] * np.repeat(base, T, axis=0) if T else np.zeros((0, n))
    else:
        xs = base.reshape(T, n)

    noise = rng.standard_normal(T) * spec.noise_sigma if spec.noise_sigma > 0 else np.zeros(T)
    ys = xs @ theta + noise
    meta = {
        "theta_star": [float(v) for v in theta],
        "noise_sigma": float(spec.noise_sigma),
        "x_dist": spec.x_dist,
        "x_scale": float(spec.x_scale),
        "adversarial": spec.adversarial,
        "max_norm_inf": float(np.abs(xs).max()) if T else 0.0,
        "max_norm_2": float(np.linalg.norm(xs, axis=1).max()) if T else 0.0,
        "seed": int(seed),
    }
    return xs, ys, meta
