"""Fixed-design gradient descent with dropout regularization.

Covers the iterate recursion, the shrunken least-squares minimizer it
converges to, the learning-rate admissibility bound, exact and sampled
second-moment contraction constants, a coupled-chain contraction probe,
and the asymptotic covariance of the averaged iterates obtained from
Lyapunov solves in the Kronecker representation.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .dropout_moments import e_dad, e_dadbd, e_dadbdcd

_LYAPUNOV_DIM_CAP = 64
_LYAPUNOV_RTOL = 1e-9


class GdProblem:
    """Immutable fixed-design problem; caches the Gram matrix and minimizer."""

    def __init__(self, X, y, p, alpha):
        self.X = linalg.as_matrix(X)
        self.y = linalg.as_vector(y)
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y row counts differ")
        if not 0.0 < p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {p}")
        if alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        self.p = float(p)
        self.alpha = float(alpha)
        self.gram = self.X.T @ self.X
        if float(np.min(np.diag(self.gram))) <= 0.0:
            raise ValueError("design is not reduced: a Gram diagonal entry vanishes")
        self.d = self.X.shape[1]
        self._minimizer = None

    @property
    def admissible(self):
        return self.alpha * linalg.operator_norm(self.gram) < 2.0

    @property
    def minimizer(self):
        if self._minimizer is None:
            self._minimizer = l2_minimizer_gd(self)
        return self._minimizer


@dataclass(frozen=True)
class GdState:
    beta: np.ndarray
    step: int


@dataclass(frozen=True)
class AsymptoticCov:
    """Covariance pieces of the averaged iterates: Xi = V0 + alpha * Bp."""
    S: np.ndarray
    S0: np.ndarray
    V0: np.ndarray
    Bp: np.ndarray
    Xi: np.ndarray


def l2_minimizer_gd(problem):
    """Target of the dropout GD recursion: (gram_p)^{-1} X^T y."""
    gram_p = linalg.p_rescale(problem.gram, problem.p)
    return linalg.solve(gram_p, problem.X.T @ problem.y)


def gd_step(problem, state, mask):
    """One masked gradient step on the full design."""
    m = np.asarray(mask.retained, dtype=float)
    if m.shape[0] != problem.d:
        raise ValueError("mask dimension does not match the design")
    beta = state.beta
    resid = problem.y - problem.X @ (m * beta)
    new_beta = beta + problem.alpha * m * (problem.X.T @ resid)
    return GdState(beta=new_beta, step=state.step + 1)


def lr_bound_gd(gram):
    """Stability bound 2 / |gram| for the learning rate."""
    g = linalg.as_square(gram)
    norm = linalg.operator_norm(g)
    if norm == 0.0:
        raise ValueError("zero Gram matrix has no finite learning-rate bound")
    return 2.0 / norm


def exact_contraction_sq(gram, p, alpha):
    """Exact second-moment contraction constant of the error recursion.

    Largest eigenvalue of E[(I - alpha D gram D)^2], expanded through
    the closed-form dropout moments.
    """
    g = linalg.as_square(gram)
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    eye = np.eye(g.shape[0])
    second = e_dadbd(g, g, p)
    m = eye - 2.0 * alpha * e_dad(g, p) + alpha * alpha * second
    return float(linalg.sym_eigenvalues(0.5 * (m + m.T))[0])


def empirical_contraction_sq(gram, p, alpha, n_draws, rng):
    """Monte Carlo contraction constant from n_draws sampled masks."""
    g = linalg.as_square(gram)
    if n_draws < 1:
        raise ValueError("need at least one mask draw")
    d = g.shape[0]
    masks = (rng.uniform(size=(n_draws, d)) < p).astype(float)
    prod = masks[:, :, None] * masks[:, None, :]
    a = np.eye(d)[None, :, :] - alpha * g[None, :, :] * prod
    mean_sq = np.einsum("nij,njk->ik", a, a) / n_draws
    return float(linalg.sym_eigenvalues(0.5 * (mean_sq + mean_sq.T))[0])


def _solve_columns(m, rhs):
    # column-by-column solve for a matrix right-hand side
    cols = [linalg.solve(m, rhs[:, j]) for j in range(rhs.shape[1])]
    return np.stack(cols, axis=1)


def asymptotic_cov_xi(X, beta_star, p, alpha):
    """Asymptotic covariance pieces of the averaged GD iterates.

    S0 is the second moment of the minimizer under the noise model, S the
    dropout-noise covariance assembled from the closed-form mask moments,
    and V0, Bp come from Lyapunov equations solved in the d^2 Kronecker
    representation.
    """
    x = linalg.as_matrix(X)
    beta = linalg.as_vector(beta_star)
    d = x.shape[1]
    if d > _LYAPUNOV_DIM_CAP:
        raise ValueError(f"dimension {d} exceeds the d <= {_LYAPUNOV_DIM_CAP} Lyapunov cap")
    if beta.shape[0] != d:
        raise ValueError("beta_star length does not match the design")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    gram = x.T @ x
    if float(np.min(np.diag(gram))) <= 0.0:
        raise ValueError("design is not reduced: a Gram diagonal entry vanishes")
    gram_p = linalg.p_rescale(gram, p)
    # S0 = gram_p^{-1} (gram b b^T gram + gram) gram_p^{-1}
    core = gram @ np.outer(beta, beta) @ gram + gram
    s0 = _solve_columns(gram_p, _solve_columns(gram_p, core).T)
    s0 = 0.5 * (s0 + s0.T)
    xbar = linalg.off_diag(gram)
    # E[(p I - D) noise form]: expand the four mask moments exactly
    s = (
        p * p * e_dad(xbar @ s0 @ xbar, p)
        - p * e_dadbd(xbar, s0 @ xbar, p)
        - p * e_dadbd(xbar @ s0, xbar, p)
        + e_dadbdcd(xbar, s0, xbar, p)
    )
    s = 0.5 * (s + s.T)
    # Lyapunov solves: (p gram_p) V + V (p gram_p) = rhs, vectorized columns
    drift = p * gram_p
    eye = np.eye(d)
    kron_sys = linalg.kronecker(eye, drift) + linalg.kronecker(drift, eye)
    v0_vec = linalg.solve(kron_sys, linalg.vec(s))
    v0 = v0_vec.reshape((d, d), order="F")
    v0 = 0.5 * (v0 + v0.T)
    resid = v0 @ drift + drift @ v0 - s
    s_norm = float(np.sqrt((s * s).sum()))
    resid_norm = float(np.sqrt((resid * resid).sum()))
    if resid_norm > _LYAPUNOV_RTOL * max(s_norm, 1e-300):
        raise ValueError("Lyapunov residual exceeds tolerance")
    bp_rhs = p * p * (gram_p @ v0 @ gram_p)
    bp_vec = linalg.solve(kron_sys, linalg.vec(bp_rhs))
    bp = bp_vec.reshape((d, d), order="F")
    bp = 0.5 * (bp + bp.T)
    return AsymptoticCov(S=s, S0=s0, V0=v0, Bp=bp, Xi=v0 + alpha * bp)


def coupled_gmc_run(problem, beta0, beta0p, steps, rng):
    """Distance trace of two chains driven by identical masks."""
    from .randgen import sample_dropout

    state_a = GdState(beta=linalg.as_vector(beta0).copy(), step=0)
    state_b = GdState(beta=linalg.as_vector(beta0p).copy(), step=0)
    gaps = []
    for _ in range(steps):
        mask = sample_dropout(problem.d, problem.p, rng)
        state_a = gd_step(problem, state_a, mask)
        state_b = gd_step(problem, state_b, mask)
        diff = state_a.beta - state_b.beta
        gaps.append(float(np.sqrt((diff * diff).sum())))
    return gaps


def agd_average(iterates):
    """Running mean of an iterate stream, updated incrementally."""
    mean = None
    count = 0
    for beta in iterates:
        b = linalg.as_vector(beta)
        if mean is None:
            mean = b.astype(float).copy()
            count = 1
        else:
            count += 1
            mean = ((count - 1) * mean + b) / count
    if mean is None:
        raise ValueError("cannot average an empty iterate stream")
    return mean
