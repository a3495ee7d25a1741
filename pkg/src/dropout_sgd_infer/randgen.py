"""Seeded random generation: dropout masks and regression data.

Streams are counter-based (Philox keyed by (seed, stream_id)), so every
replication of an experiment owns an independent stream whose draws do
not depend on scheduling. Normal variates go through the package's own
inverse normal CDF applied to 53-bit uniforms; a single code path
produces every Gaussian in the library.
"""

from dataclasses import dataclass

import numpy as np

from .inference import inv_norm_cdf

_TWO53_INV = 2.0 ** -53


class RngStream:
    """Deterministic random stream identified by (seed, stream_id)."""

    def __init__(self, seed, stream_id=0):
        seed = int(seed)
        stream_id = int(stream_id)
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if not 0 <= stream_id < 2 ** 64:
            raise ValueError("stream_id must fit in an unsigned 64-bit integer")
        self.seed = seed
        self.stream_id = stream_id
        self.counter = 0
        key = np.array([seed, stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def uniform(self, size=None):
        """Uniform draws in the open interval (0, 1)."""
        raw = self._gen.integers(0, 2 ** 64, size=size, dtype=np.uint64)
        self.counter += int(np.size(raw))
        u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO53_INV
        if size is None:
            return float(u)
        return u

    def normal(self, size=None):
        """Standard normal draws via the package inverse CDF."""
        return inv_norm_cdf(self.uniform(size=size))


@dataclass(frozen=True)
class DropoutMask:
    retained: np.ndarray  # 0/1 entries
    p: float

    def __post_init__(self):
        vals = np.asarray(self.retained)
        if not np.all((vals == 0) | (vals == 1)):
            raise ValueError("mask entries must be exactly 0 or 1")


@dataclass(frozen=True)
class FixedDesignData:
    X: np.ndarray
    y: np.ndarray
    beta_star: np.ndarray

    def __post_init__(self):
        if np.min((self.X ** 2).sum(axis=0)) <= 0.0:
            raise ValueError("every design column must have positive norm")


@dataclass(frozen=True)
class StreamSample:
    y_k: float
    x_k: np.ndarray


def sample_dropout(d, p, rng):
    """Draw a d-dimensional Bernoulli(p) retention mask."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    # uniforms are strictly below 1, so p=1 retains every coordinate
    retained = (rng.uniform(size=d) < p).astype(np.int64)
    return DropoutMask(retained=retained, p=p)


def gen_fixed_design(n, d, beta_star, rng):
    """Standard normal design with y = X beta_star + standard normal noise."""
    if not n >= d >= 1:
        raise ValueError(f"need n >= d >= 1, got n={n}, d={d}")
    beta = np.asarray(beta_star, dtype=float)
    if beta.shape != (d,):
        raise ValueError("beta_star length must equal d")
    x = rng.normal(size=(n, d))
    # zero columns happen with probability zero but break the reduced form
    for _ in range(16):
        dead = (x ** 2).sum(axis=0) == 0.0
        if not np.any(dead):
            break
        x[:, dead] = rng.normal(size=(n, int(dead.sum())))
    eps = rng.normal(size=n)
    y = x @ beta + eps
    return FixedDesignData(X=x, y=y, beta_star=beta.copy())


def stream_sample(beta_star, rng):
    """One streaming observation: x_k isotropic normal, unit noise."""
    beta = np.asarray(beta_star, dtype=float)
    x = rng.normal(size=beta.shape[0])
    y = float(x @ beta + rng.normal())
    return StreamSample(y_k=y, x_k=x)
