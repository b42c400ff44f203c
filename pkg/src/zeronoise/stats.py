"""Small statistical toolkit: two-sample KS, log-log regression, empirical
characteristic functions and the Wilson score interval."""

from dataclasses import dataclass

import numpy as np

from ._errors import InvalidArgumentError


@dataclass(frozen=True)
class TestReport:
    statistic: float
    p_value: float
    passed: bool
    significance: float

    __test__ = False  # keep pytest from collecting this class

    def to_dict(self):
        return {"statistic": self.statistic, "p_value": self.p_value,
                "passed": self.passed, "significance": self.significance}


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    r_squared: float


def kolmogorov_sf(x, tol=1e-10):
    """Survival function of the Kolmogorov distribution, P(K > x).

    Uses the alternating series ``2 sum (-1)^(k-1) exp(-2 k^2 x^2)`` for
    ``x >= 1`` and the Jacobi theta form for ``x < 1``; both are truncated
    once a term drops below ``tol``.
    """
    if x <= 0:
        return 1.0
    total = 0.0
    if x < 1.0:
        # 1 - sqrt(2 pi)/x * sum exp(-(2k-1)^2 pi^2 / (8 x^2))
        w = np.pi ** 2 / (8.0 * x * x)
        k = 1
        while True:
            term = np.exp(-((2 * k - 1) ** 2) * w)
            total += term
            if term < tol:
                break
            k += 1
        return float(min(1.0, max(0.0, 1.0 - np.sqrt(2.0 * np.pi) / x * total)))
    k = 1
    while True:
        term = np.exp(-2.0 * k * k * x * x)
        total += term if k % 2 else -term
        if term < tol:
            break
        k += 1
    return float(min(1.0, max(0.0, 2.0 * total)))


def ks_two_sample(a, b, significance=0.01):
    """Two-sided two-sample Kolmogorov-Smirnov test with asymptotic p-value."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size < 25 or b.size < 25:
        raise InvalidArgumentError(
            f"KS test needs at least 25 observations per sample, got {a.size} and {b.size}")
    if not 0 < significance < 1:
        raise InvalidArgumentError(f"significance must lie in (0, 1), got {significance}")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = a.size * b.size / (a.size + b.size)
    p = kolmogorov_sf(np.sqrt(en) * d)
    return TestReport(d, p, p >= significance, significance)


def loglog_fit(ts, xs):
    """Least squares of log|x| on log t."""
    ts = np.asarray(ts, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if ts.shape != xs.shape or ts.ndim != 1 or ts.size < 2:
        raise InvalidArgumentError("ts and xs must be equal-length 1-d arrays of size >= 2")
    if np.any(ts <= 0):
        raise InvalidArgumentError("all times must be positive")
    if np.any(xs == 0):
        raise InvalidArgumentError("log-log fit undefined for zero values")
    u = np.log(ts)
    v = np.log(np.abs(xs))
    du = u - u.mean()
    sxx = float(du @ du)
    if sxx == 0.0:
        raise InvalidArgumentError("all times are equal; slope is undefined")
    dv = v - v.mean()
    slope = float(du @ dv) / sxx
    intercept = float(v.mean() - slope * u.mean())
    resid = dv - slope * du
    ss_tot = float(dv @ dv)
    ss_res = float(resid @ resid)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LogLogFit(slope, intercept, min(1.0, max(0.0, r2)))


def empirical_cf(sample, lambdas):
    """Empirical characteristic function ``mean(exp(i * lam * x))`` per lambda."""
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise InvalidArgumentError("sample must be non-empty")
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    phase = np.outer(lam, x)
    return np.cos(phase).mean(axis=1) + 1j * np.sin(phase).mean(axis=1)


def empirical_cf_stderr(sample, lambdas):
    """Standard errors of the real and imaginary parts of :func:`empirical_cf`."""
    x = np.asarray(sample, dtype=float).ravel()
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    phase = np.outer(lam, x)
    n = x.size
    return (np.cos(phase).std(axis=1, ddof=1) / np.sqrt(n),
            np.sin(phase).std(axis=1, ddof=1) / np.sqrt(n))


def wilson_interval(successes, trials, z=1.959963984540054):
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials <= 0:
        raise InvalidArgumentError("Wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise InvalidArgumentError(f"successes must lie in [0, {trials}], got {successes}")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * np.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    # guard the endpoints against rounding when p is 0 or 1
    return float(max(0.0, min(p, centre - half))), float(min(1.0, max(p, centre + half)))
