"""Small dense linear algebra for fixed dimension d.

Everything here is plain numpy with hand-rolled factorizations: a cyclic
Jacobi eigensolver for symmetric matrices and Gaussian elimination with
partial pivoting. Dimensions stay small (d <= ~60), so robustness and
determinism win over BLAS-grade speed.
"""

import numpy as np

_SYM_RTOL = 1e-10
_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100
_PIVOT_RTOL = 1e-12
_RESIDUAL_RTOL = 1e-9


def as_matrix(a):
    """Validate and return a 2-D float array with finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError("expected a 2-D matrix with positive dimensions")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def as_square(a):
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def as_vector(v):
    """Validate and return a 1-D float array with finite entries."""
    x = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError("expected a 1-D vector with positive length")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    return x


def diag_part(a):
    """Diagonal part of a square matrix, off-diagonal zeroed.

    >>> diag_part([[1.0, 2.0], [3.0, 4.0]]).tolist()
    [[1.0, 0.0], [0.0, 4.0]]
    """
    m = as_square(a)
    return np.diag(np.diag(m))


def off_diag(a):
    """Off-diagonal part: a - diag_part(a).

    >>> off_diag([[1.0, 2.0], [3.0, 4.0]]).tolist()
    [[0.0, 2.0], [3.0, 0.0]]
    """
    m = as_square(a)
    return m - np.diag(np.diag(m))


def p_rescale(a, p):
    """Shrink the off-diagonal entries by p: p*a + (1-p)*diag_part(a)."""
    m = as_square(a)
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return p * m + (1.0 - p) * np.diag(np.diag(m))


def hadamard(a, b):
    """Entrywise product of two same-shape matrices."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"shape mismatch {ma.shape} vs {mb.shape}")
    return ma * mb


def kronecker(a, b):
    """Kronecker product with blocks a[i, j] * b."""
    ma, mb = as_matrix(a), as_matrix(b)
    p, q = ma.shape
    m, n = mb.shape
    out = ma[:, None, :, None] * mb[None, :, None, :]
    return out.reshape(p * m, q * n)


def vec(u):
    """Stack the columns of u into one long vector.

    >>> vec([[1.0, 3.0], [2.0, 4.0]]).tolist()
    [1.0, 2.0, 3.0, 4.0]
    """
    m = as_matrix(u)
    return m.reshape(-1, order="F").copy()


def sym_eigh(s):
    """Eigenvalues (descending) and matching eigenvector columns.

    Cyclic Jacobi rotations with accumulated transforms; converges when
    the off-diagonal Frobenius mass drops below 1e-12 of the full
    Frobenius norm.
    """
    m = as_square(s)
    scale = float(np.max(np.abs(m)))
    if float(np.max(np.abs(m - m.T))) > _SYM_RTOL * scale:
        raise ValueError("matrix is not symmetric within 1e-10 relative tolerance")
    a = 0.5 * (m + m.T)
    d = a.shape[0]
    if d == 1:
        return np.array([a[0, 0]]), np.eye(1)
    v = np.eye(d)
    fro = float(np.sqrt((a * a).sum()))
    tol = _JACOBI_TOL * fro
    for _ in range(_JACOBI_MAX_SWEEPS):
        off_mass = float(np.sqrt(2.0 * (np.triu(a, 1) ** 2).sum()))
        if off_mass <= tol:
            break
        for i in range(d - 1):
            for j in range(i + 1, d):
                apq = a[i, j]
                if apq == 0.0:
                    continue
                tau = (a[j, j] - a[i, i]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * c
                col_i = a[:, i].copy()
                col_j = a[:, j].copy()
                a[:, i] = c * col_i - sn * col_j
                a[:, j] = sn * col_i + c * col_j
                row_i = a[i, :].copy()
                row_j = a[j, :].copy()
                a[i, :] = c * row_i - sn * row_j
                a[j, :] = sn * row_i + c * row_j
                a[i, j] = 0.0
                a[j, i] = 0.0
                vec_i = v[:, i].copy()
                vec_j = v[:, j].copy()
                v[:, i] = c * vec_i - sn * vec_j
                v[:, j] = sn * vec_i + c * vec_j
    else:
        raise RuntimeError("Jacobi eigensolver did not converge in 100 sweeps")
    order = np.argsort(np.diag(a))[::-1]
    return np.diag(a)[order].copy(), v[:, order].copy()


def sym_eigenvalues(s):
    """All eigenvalues of a symmetric matrix, sorted descending."""
    return sym_eigh(s)[0]


def operator_norm(a):
    """Spectral norm sqrt(lambda_max(a^T a)); works for rectangular a."""
    m = as_matrix(a)
    g = m.T @ m
    g = 0.5 * (g + g.T)
    top = float(sym_eigenvalues(g)[0])
    return float(np.sqrt(max(top, 0.0)))


def solve(m, b):
    """Solve m x = b by Gaussian elimination with partial pivoting.

    Raises on pivots below 1e-12 of the largest entry, and verifies the
    residual against 1e-9 * (|m| |x| + |b|) before returning.
    """
    mm = as_square(m)
    bv = as_vector(b)
    n = mm.shape[0]
    if bv.shape[0] != n:
        raise ValueError(f"rhs length {bv.shape[0]} does not match matrix size {n}")
    aug = np.concatenate([mm, bv[:, None]], axis=1)
    thresh = _PIVOT_RTOL * float(np.max(np.abs(mm)))
    for k in range(n):
        piv = k + int(np.argmax(np.abs(aug[k:, k])))
        if abs(aug[piv, k]) <= thresh:
            raise ValueError("matrix is singular to working precision")
        if piv != k:
            aug[[k, piv]] = aug[[piv, k]]
        factors = aug[k + 1:, k] / aug[k, k]
        aug[k + 1:, k:] -= factors[:, None] * aug[k, k:]
        aug[k + 1:, k] = 0.0
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (aug[k, n] - aug[k, k + 1: n] @ x[k + 1:]) / aug[k, k]
    resid = float(np.sqrt(((mm @ x - bv) ** 2).sum()))
    m_norm = float(np.sqrt((mm * mm).sum()))
    x_norm = float(np.sqrt((x * x).sum()))
    b_norm = float(np.sqrt((bv * bv).sum()))
    if resid > _RESIDUAL_RTOL * (m_norm * x_norm + b_norm):
        raise ValueError("solve residual exceeds tolerance; matrix too ill-conditioned")
    return x


def moment_inequality_gap(x, y, q):
    """Evaluate the second-order norm expansion bound for one pair.

    Returns (lhs, rhs_i, rhs_ii) where lhs is the absolute remainder of
    the expansion of |x+y|^q around x, rhs_i is the deterministic bound,
    and rhs_ii the single-sample evaluation of its moment form. The
    contract lhs <= rhs_i holds for every q >= 2.
    """
    xv = as_vector(x)
    yv = as_vector(y)
    if xv.shape != yv.shape:
        raise ValueError("x and y must have the same dimension")
    if q < 2.0:
        raise ValueError(f"q must be >= 2, got {q}")
    nx = float(np.sqrt((xv * xv).sum()))
    ny = float(np.sqrt((yv * yv).sum()))
    s = xv + yv
    ns = float(np.sqrt((s * s).sum()))
    inner = float(xv @ yv)
    lhs = abs(ns ** q - nx ** q - q * nx ** (q - 2.0) * inner)
    rhs_i = (nx + ny) ** q - nx ** q - q * nx ** (q - 1.0) * ny
    mx = nx ** q
    my = ny ** q
    rhs_ii = (mx ** (1.0 / q) + my ** (1.0 / q)) ** q - mx - q * mx ** ((q - 1.0) / q) * my ** (1.0 / q)
    return lhs, rhs_i, rhs_ii
