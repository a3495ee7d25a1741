"""Normal and chi-square quantiles plus online confidence-set helpers.

The quantile routines are self-contained: an Acklam-style rational
approximation refined by one Halley step for the normal, and a
Wilson-Hilferty seed polished by Newton iterations on the regularized
incomplete gamma for the chi-square. Both are accurate far beyond the
documented tolerances (1e-9 absolute, 1e-8 relative).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

_SQRT2 = math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Rational approximation coefficients (central and tail regions).
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _rational_seed(u):
    # u in (0, 0.5]; returns the nonpositive-side approximation
    out = np.empty_like(u)
    tail = u < _P_LOW
    if np.any(tail):
        q = np.sqrt(-2.0 * np.log(u[tail]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        out[tail] = num / den
    mid = ~tail
    if np.any(mid):
        q = u[mid] - 0.5
        r = q * q
        num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        out[mid] = q * num / den
    return out


def _lower_half_quantile(u):
    # exact CDF on the nonpositive side: Phi(x) = erfc(-x/sqrt(2))/2
    x = _rational_seed(u)
    err = 0.5 * erfc(-x / _SQRT2) - u
    density = np.exp(-0.5 * x * x) * _INV_SQRT2PI
    step = err / density
    return x - step / (1.0 + 0.5 * x * step)


def inv_norm_cdf(u):
    """Standard normal quantile; accepts scalars or numpy arrays."""
    arr = np.asarray(u, dtype=float)
    if arr.size == 0:
        raise ValueError("empty input")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("quantile argument must lie strictly inside (0, 1)")
    lower = np.minimum(arr, 1.0 - arr)
    x = _lower_half_quantile(np.atleast_1d(lower))
    x = np.where(np.atleast_1d(arr) > 0.5, -x, x)
    if arr.ndim == 0:
        return float(x[0])
    return x.reshape(arr.shape)


def _reg_lower_gamma(a, x):
    # regularized lower incomplete gamma P(a, x), scalar arguments
    if x <= 0.0:
        return 0.0
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1.0:
        # series expansion
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(500):
            denom += 1.0
            term *= x / denom
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        return total * math.exp(log_prefactor)
    # continued fraction for Q(a, x), modified Lentz
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return 1.0 - math.exp(log_prefactor) * h


def chi2_quantile(dof, u):
    """Chi-square quantile for integer degrees of freedom dof >= 1."""
    if int(dof) != dof or dof < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {dof}")
    dof = int(dof)
    if not 0.0 < u < 1.0:
        raise ValueError("quantile argument must lie strictly inside (0, 1)")
    a = 0.5 * dof
    z = inv_norm_cdf(u)
    # Wilson-Hilferty cube approximation as the Newton seed
    h = 2.0 / (9.0 * dof)
    x = dof * (1.0 - h + z * math.sqrt(h)) ** 3
    if x <= 0.0:
        x = 1e-8
    log_norm = -a * math.log(2.0) - math.lgamma(a)
    for _ in range(100):
        err = _reg_lower_gamma(a, 0.5 * x) - u
        pdf = math.exp((a - 1.0) * math.log(x) - 0.5 * x + log_norm)
        if pdf <= 0.0:
            break
        step = err / pdf
        new_x = x - step
        while new_x <= 0.0:
            step *= 0.5
            new_x = x - step
        x = new_x
        if abs(step) <= 1e-13 * max(x, 1.0):
            break
    return x


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError("interval bounds out of order")

    def contains(self, value):
        return self.lower <= value <= self.upper

    @property
    def length(self):
        return self.upper - self.lower


@dataclass(frozen=True)
class JointRegion:
    """Ellipsoidal confidence region around an averaged iterate."""
    center: np.ndarray
    scale: np.ndarray
    n: int
    threshold: float


def ci_coordinate(mean_j, var_jj, n, omega):
    """Two-sided interval mean_j +/- z_{1-omega/2} sqrt(var_jj / n)."""
    if var_jj < 0.0:
        raise ValueError(f"variance estimate must be nonnegative, got {var_jj}")
    if n < 1:
        raise ValueError("sample size must be positive")
    if not 0.0 < omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    z = inv_norm_cdf(1.0 - 0.5 * omega)
    half = z * math.sqrt(var_jj / n)
    return ConfidenceInterval(mean_j - half, mean_j + half, 1.0 - omega)


def ci_projection(v, mean, sigma_hat, n, omega):
    """Interval for the projection v^T beta; v must be a unit vector."""
    from . import linalg

    vv = linalg.as_vector(v)
    mu = linalg.as_vector(mean)
    sig = linalg.as_square(sigma_hat)
    if vv.shape[0] != mu.shape[0] or sig.shape[0] != mu.shape[0]:
        raise ValueError("dimension mismatch between v, mean, and sigma_hat")
    norm = float(np.sqrt((vv * vv).sum()))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"projection direction must be a unit vector, |v| = {norm}")
    var = float(vv @ sig @ vv)
    return ci_coordinate(float(vv @ mu), var, n, omega)


def joint_region(mean, sigma_hat, n, omega, conventional=False):
    """Build the ellipsoidal region; threshold at 1 - omega/2 by default.

    The experiments calibrate against the chi-square percentile at
    1 - omega/2; pass conventional=True for the usual 1 - omega rule.
    """
    from . import linalg

    mu = linalg.as_vector(mean)
    sig = linalg.as_square(sigma_hat)
    if sig.shape[0] != mu.shape[0]:
        raise ValueError("dimension mismatch between mean and sigma_hat")
    if n < 1:
        raise ValueError("sample size must be positive")
    if not 0.0 < omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    level = 1.0 - omega if conventional else 1.0 - 0.5 * omega
    threshold = chi2_quantile(mu.shape[0], level)
    return JointRegion(center=mu, scale=sig, n=int(n), threshold=threshold)


def joint_region_contains(region, beta):
    """Return (contained, statistic) for a candidate parameter vector."""
    from . import linalg

    b = linalg.as_vector(beta)
    delta = region.center - b
    # solve instead of inverting; raises on singular scale matrices
    inv_delta = linalg.solve(region.scale, delta)
    statistic = float(region.n * (delta @ inv_delta))
    return statistic <= region.threshold, statistic


def coverage_tally(indicators):
    """Empirical coverage rate and its binomial standard error."""
    flags = list(indicators)
    if not flags:
        raise ValueError("cannot tally an empty indicator list")
    r = len(flags)
    rate = float(sum(1.0 for f in flags if f) / r)
    se = math.sqrt(rate * (1.0 - rate) / r)
    return rate, se
