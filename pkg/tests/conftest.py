"""Shared stream generators for the test battery."""

import numpy as np


def make_stream(rng, n, T, y_bound=10.0, x_scale=1.0):
    """Random linear-model stream with outcomes clipped into [-y_bound, y_bound]."""
    xs = rng.uniform(-x_scale, x_scale, size=(T, n))
    theta = rng.standard_normal(n) * rng.uniform(0.5, 2.0)
    ys = xs @ theta + rng.standard_normal(T) * rng.uniform(0.0, 1.0)
    np.clip(ys, -y_bound, y_bound, out=ys)
    return xs, ys


def random_spd(rng, n, shift=1.0):
    m = rng.standard_normal((n, n))
    return m @ m.T + shift * np.eye(n)
