"""Exact expectations of matrix products sandwiched by dropout masks.

For a diagonal matrix D with i.i.d. Bernoulli(p) entries, E[DAD],
E[DADBD], and E[DADBDCD] admit closed forms in the p-rescaled matrices.
An exhaustive enumeration over all 2^d masks provides the independent
cross-check; the closed forms never call it.
"""

from itertools import product

import numpy as np

from .linalg import as_square, diag_part, hadamard, off_diag, p_rescale

_ENUM_CAP = 20


def _check_p(p):
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")


def _check_same_square(*mats):
    out = [as_square(m) for m in mats]
    d = out[0].shape[0]
    for m in out[1:]:
        if m.shape[0] != d:
            raise ValueError("all matrices must share the same dimension")
    return out


def e_dad(a, p):
    """E[D a D] = p * p_rescale(a, p)."""
    (m,) = _check_same_square(a)
    _check_p(p)
    return p * p_rescale(m, p)


def e_dadbd(a, b, p):
    """E[D a D b D] = p a_p b_p + p^2 (1-p) Diag(off(a) b)."""
    ma, mb = _check_same_square(a, b)
    _check_p(p)
    return p * (p_rescale(ma, p) @ p_rescale(mb, p)) \
        + p * p * (1.0 - p) * diag_part(off_diag(ma) @ mb)


def e_dadbdcd(a, b, c, p):
    """E[D a D b D c D] as a closed form in the p-rescaled factors."""
    ma, mb, mc = _check_same_square(a, b, c)
    _check_p(p)
    ap = p_rescale(ma, p)
    bp = p_rescale(mb, p)
    cp = p_rescale(mc, p)
    a_bar = off_diag(ma)
    b_bar = off_diag(mb)
    c_bar = off_diag(mc)
    correction = (
        diag_part(a_bar @ bp @ c_bar)
        + ap @ diag_part(b_bar @ mc)
        + diag_part(ma @ b_bar) @ cp
        + (1.0 - p) * hadamard(hadamard(ma, b_bar.T), mc)
    )
    return p * (ap @ bp @ cp) + p * p * (1.0 - p) * correction


def enumerate_expectation(f, d, p):
    """Exact E[f(mask)] by summing f over all 2^d retention masks.

    f maps a 0/1 vector of length d to a matrix. Brute force; d is
    capped at 20 because the sum has 2^d terms.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if d > _ENUM_CAP:
        raise ValueError(f"enumeration over 2^{d} masks exceeds the d <= {_ENUM_CAP} cap")
    _check_p(p)
    total = None
    for bits in product((0.0, 1.0), repeat=d):
        mask = np.array(bits)
        ones = int(mask.sum())
        weight = p ** ones * (1.0 - p) ** (d - ones)
        if weight == 0.0:
            continue
        value = np.asarray(f(mask), dtype=float)
        total = weight * value if total is None else total + weight * value
    return total
