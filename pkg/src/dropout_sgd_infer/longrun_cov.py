"""Online long-run covariance estimation over non-overlapping blocks.

Block m covers steps floor(c * m^zeta) .. floor(c * (m+1)^zeta) - 1.  The
estimator keeps running block sums and three accumulators so that each new
iterate costs O(d^2), and finalizes to the centered block-sum covariance
at any step without touching past iterates.
"""

import math

import numpy as np

from . import linalg
from .sgd_dropout import AsgdState

_PSD_TOL = 1e-10


class BlockSchedule:
    """Polynomial block boundaries eta(m) = floor(c * m^zeta), lazily cached."""

    def __init__(self, c, zeta):
        if not c > 0.0:
            raise ValueError(f"c must be positive, got {c}")
        if not zeta > 1.0:
            raise ValueError(f"zeta must exceed 1, got {zeta}")
        self.c = float(c)
        self.zeta = float(zeta)
        self._etas = []
        if self.eta(1) != 1:
            raise ValueError(
                "first block must start at step 1: floor(c) must equal 1, "
                f"got c={c}"
            )

    def eta(self, m):
        if m < 1:
            raise ValueError(f"block index must be at least 1, got {m}")
        while len(self._etas) < m:
            k = len(self._etas) + 1
            value = int(math.floor(self.c * float(k) ** self.zeta))
            if self._etas and value <= self._etas[-1]:
                raise ValueError(f"block schedule repeats boundary {value} at m={k}")
            self._etas.append(value)
        return self._etas[m - 1]


class CovState:
    """Streaming state: block-sum accumulators plus the running mean."""

    def __init__(self, d, schedule):
        if d < 1:
            raise ValueError(f"d must be at least 1, got {d}")
        self.schedule = schedule
        self.V = np.zeros((d, d))
        self.K = 0.0
        self.H = np.zeros(d)
        self.R = np.zeros(d)
        self.psi = 0
        self.delta = 0
        self.mean = AsgdState(d)
        self.n = 0

    def update(self, beta):
        b = linalg.as_vector(beta)
        self.mean.update(b)
        n_new = self.n + 1
        if n_new < self.schedule.eta(self.psi + 1):
            r_old = self.R
            d_old = self.delta
            r_new = r_old + b
            d_new = d_old + 1
            self.K += float(d_new * d_new - d_old * d_old)
            self.H = self.H + (d_new * r_new - d_old * r_old)
            self.V = self.V + (np.outer(r_new, r_new) - np.outer(r_old, r_old))
            self.R = r_new
            self.delta = d_new
        else:
            self.psi += 1
            self.R = b.copy()
            self.delta = 1
            self.K += 1.0
            self.H = self.H + self.R
            self.V = self.V + np.outer(self.R, self.R)
        self.n = n_new
        return self

    def finalize(self):
        if self.n < 1:
            raise ValueError("cannot finalize before the first update")
        m = self.mean.mean
        sig = (
            self.V
            + self.K * np.outer(m, m)
            - np.outer(self.H, m)
            - np.outer(m, self.H)
        ) / self.n
        sig = 0.5 * (sig + sig.T)
        vals, vecs = linalg.sym_eigh(sig)
        if float(vals[-1]) < -_PSD_TOL:
            raise ValueError("covariance estimate lost positive semidefiniteness")
        rebuilt = (vecs * np.maximum(vals, 0.0)) @ vecs.T
        return 0.5 * (rebuilt + rebuilt.T)


def cov_update(state, beta):
    return state.update(beta)


def cov_finalize(state):
    return state.finalize()


def offline_nbm(betas, schedule):
    """Covariance from stored iterates, for checking the streaming path."""
    b = linalg.as_matrix(betas)
    n = b.shape[0]
    if n < 1:
        raise ValueError("need at least one iterate")
    psi = 1
    while schedule.eta(psi + 1) <= n:
        psi += 1
    centered = b - b.mean(axis=0)
    starts = np.array([schedule.eta(m) - 1 for m in range(1, psi + 1)], dtype=np.intp)
    sums = np.add.reduceat(centered, starts, axis=0)
    sig = np.einsum("mi,mj->ij", sums, sums) / n
    return 0.5 * (sig + sig.T)
