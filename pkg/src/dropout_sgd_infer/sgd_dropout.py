"""Streaming-data stochastic gradient descent with dropout masks.

One fresh regression pair per step, one mask per step, Polyak averaging
of the iterates, and the sampled second-moment admissibility check that
decides whether a learning rate keeps the averaged chain normal.
"""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import linalg

_MIN_ADMISSIBILITY_DRAWS = 1000
_BISECT_RTOL = 1e-6


@dataclass(frozen=True)
class SgdConfig:
    d: int
    p: float
    alpha: float
    beta_star: np.ndarray

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be at least 1, got {self.d}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        beta = linalg.as_vector(self.beta_star)
        if beta.shape[0] != self.d:
            raise ValueError("beta_star length does not match d")
        object.__setattr__(self, "beta_star", beta)


@dataclass(frozen=True)
class SgdState:
    beta: np.ndarray
    step: int


class AsgdState:
    """Running iterate average; update cost is O(d) per step."""

    def __init__(self, d):
        if d < 1:
            raise ValueError(f"d must be at least 1, got {d}")
        self.mean = np.zeros(d)
        self.count = 0

    def update(self, beta):
        self.mean = (self.count * self.mean + beta) / (self.count + 1)
        self.count += 1
        return self


def asgd_update(state, beta):
    return state.update(linalg.as_vector(beta))


def sgd_step(config, state, sample, mask):
    """One masked stochastic gradient step on a single observation."""
    m = np.asarray(mask.retained, dtype=float)
    beta = state.beta
    x = sample.x_k
    resid = sample.y_k - float(x @ (m * beta))
    new_beta = beta + config.alpha * resid * (m * x)
    return SgdState(beta=new_beta, step=state.step + 1)


def l2_minimizer_sgd(ex_gram_p, ex_yx):
    """Solves E[rescaled per-step Gram] beta = E[y x]."""
    return linalg.solve(linalg.as_square(ex_gram_p), linalg.as_vector(ex_yx))


def _admissibility_matrices(x_draws, p):
    # closed-form mask moments of the rank-one per-step Gram, averaged over draws
    x = x_draws
    n = x.shape[0]
    sq = x * x
    s = sq.sum(axis=1)
    gram_mean = x.T @ x / n
    first = linalg.p_rescale(gram_mean, p)
    cube = x * sq
    cross = x.T @ cube / n
    second = (
        p * p * np.einsum("n,ni,nj->ij", s, x, x) / n
        + p * (1.0 - p) * (cross + cross.T)
        + (1.0 - p) ** 2 * np.diag((sq * sq).mean(axis=0))
        + p * (1.0 - p) * np.diag((sq * (s[:, None] - sq)).mean(axis=0))
    )
    return first, second


def lr_admissible_q2(config, x_draws):
    """Second-moment admissibility of the learning rate.

    Returns (threshold, admissible): the largest stable rate estimated from
    the draws by bisection, and whether config.alpha itself passes.
    """
    x = linalg.as_matrix(x_draws)
    if x.shape[0] < _MIN_ADMISSIBILITY_DRAWS:
        raise ValueError(
            f"admissibility check needs at least {_MIN_ADMISSIBILITY_DRAWS} draws, "
            f"got {x.shape[0]}"
        )
    if x.shape[1] != config.d:
        raise ValueError("draw dimension does not match config.d")
    p = config.p
    first, second = _admissibility_matrices(x, p)

    def min_eig(alpha):
        m = 2.0 * p * first - alpha * p * second
        return float(linalg.sym_eigenvalues(0.5 * (m + m.T))[-1])

    if min_eig(0.0) <= 0.0:
        return 0.0, False
    lo, hi = 0.0, 1.0
    grew = 0
    while min_eig(hi) > 0.0:
        lo, hi = hi, 2.0 * hi
        grew += 1
        if grew > 200:
            return math.inf, True
    while hi - lo > _BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if min_eig(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), min_eig(config.alpha) > 0.0


@dataclass(frozen=True)
class MultiRateRun:
    rates: tuple
    states: tuple
    averages: tuple

    @property
    def stacked(self):
        return np.concatenate([a.mean for a in self.averages])


def parallel_run(rates, config, n, rng, burn_in=0):
    """Runs one chain per rate in lockstep on shared data and masks."""
    from .randgen import sample_dropout, stream_sample

    if len(rates) == 0:
        raise ValueError("parallel_run needs at least one rate")
    if n < 1:
        raise ValueError(f"step count must be positive, got {n}")
    if not 0 <= burn_in < n:
        raise ValueError(f"burn_in must lie in [0, n), got {burn_in}")
    configs = [dataclasses.replace(config, alpha=float(r)) for r in rates]
    states = [SgdState(beta=np.zeros(config.d), step=0) for _ in rates]
    averages = [AsgdState(config.d) for _ in rates]
    for k in range(n):
        sample = stream_sample(config.beta_star, rng)
        mask = sample_dropout(config.d, config.p, rng)
        for i in range(len(rates)):
            states[i] = sgd_step(configs[i], states[i], sample, mask)
            if k >= burn_in:
                averages[i].update(states[i].beta)
    return MultiRateRun(rates=tuple(float(r) for r in rates),
                        states=tuple(states), averages=tuple(averages))
