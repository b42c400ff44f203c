"""Monte-Carlo estimation of the selection probabilities and growth rates."""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._errors import InvalidArgumentError, RegimeViolationError, NumericalFailureError
from .scaling import (Escape, asymptotic_ratio, check_regime, classify_escape,
                      default_escape_threshold, log_spaced_indices, scaling_exponents,
                      tail_start_index)
from .sde import simulate
from .stats import loglog_fit, wilson_interval


@dataclass(frozen=True)
class SelectionEstimate:
    n_total: int
    n_plus: int
    n_minus: int
    n_undecided: int
    p_plus_hat: float
    ci_low: float
    ci_high: float

    @property
    def empty_decided(self):
        return self.n_plus + self.n_minus == 0

    @property
    def undecided_fraction(self):
        return self.n_undecided / self.n_total

    def contains(self, p):
        return not self.empty_decided and self.ci_low <= p <= self.ci_high

    def to_dict(self):
        return {
            "n_total": self.n_total,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "n_undecided": self.n_undecided,
            "p_plus_hat": self.p_plus_hat,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "empty_decided": self.empty_decided,
        }

    @classmethod
    def from_counts(cls, n_plus, n_minus, n_undecided):
        decided = n_plus + n_minus
        total = decided + n_undecided
        if decided == 0:
            return cls(total, 0, 0, n_undecided, None, None, None)
        lo, hi = wilson_interval(n_plus, decided)
        return cls(total, n_plus, n_minus, n_undecided, n_plus / decided, lo, hi)


@dataclass(frozen=True)
class GrowthFit:
    slope: float
    intercept: float
    r_squared: float
    theory_exponent: float
    theory_coefficient: float


def _classify_paths(config, indices, threshold, tail_fraction, mirror):
    out = np.empty(len(indices), dtype=np.int8)
    for j, i in enumerate(indices):
        _, x = simulate(config, i, mirror)
        K = threshold
        if K is None:
            t_tail = x.times[tail_start_index(x, tail_fraction)]
            K = default_escape_threshold(config.drift, t_tail)
        out[j] = classify_escape(x, K, tail_fraction)
    return out


def _chunks(n, jobs):
    # fixed chunking keeps the work split independent of scheduling
    size = max(1, min(256, -(-n // (4 * jobs))))
    return [range(lo, min(n, lo + size)) for lo in range(0, n, size)]


def _map_paths(fn, config, n_paths, jobs, *args):
    """Apply ``fn(config, indices, *args)`` over all path indices and
    concatenate in index order."""
    jobs = (os.cpu_count() or 1) if jobs is None else int(jobs)
    if jobs < 1:
        raise InvalidArgumentError(f"jobs must be at least 1, got {jobs}")
    if jobs == 1 or n_paths < 2:
        return fn(config, range(n_paths), *args)
    chunks = _chunks(n_paths, jobs)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(fn, *zip(*[(config, c, *args) for c in chunks])))
    return np.concatenate(parts)


def _require_regime(config, force):
    report = check_regime(config.drift.alpha, config.noise.beta, config.noise.kind)
    if not report.regime_ok and not force:
        raise RegimeViolationError(
            f"alpha + 1/beta = {report.condition_value:.4g} <= 1; pass force=True to override")
    return report


def estimate_selection(config, n_paths, threshold=None, tail_fraction=0.2,
                       jobs=1, mirror=False, force=False):
    """Estimate ``p_plus`` from ``n_paths`` independent simulated paths.

    Path ``i`` uses stream ``(config.seed, i)``, so the result depends only
    on ``(config, n_paths)`` and never on ``jobs``. ``threshold=None`` uses
    :func:`default_escape_threshold` at the start of the tail.
    """
    if int(n_paths) != n_paths or n_paths < 1:
        raise InvalidArgumentError(f"n_paths must be a positive integer, got {n_paths}")
    _require_regime(config, force)
    codes = _map_paths(_classify_paths, config, int(n_paths), jobs,
                       threshold, tail_fraction, mirror)
    return SelectionEstimate.from_counts(int(np.sum(codes == Escape.PLUS)),
                                         int(np.sum(codes == Escape.MINUS)),
                                         int(np.sum(codes == Escape.UNDECIDED)))


def _log_escape_mass(c, alpha):
    """Logarithm of int_0^inf exp(-2 c u^(1+alpha) / (1+alpha)) du by adaptive quadrature.

    Integrated in ``s = log u``, where the integrand ``exp(s - k e^(m s))`` is
    a single bump; for alpha near -1 the mass in ``u`` spans dozens of
    decades and a finite cut-off in ``u`` is unreliable.
    """
    k = 2.0 * c / (1.0 + alpha)
    m = 1.0 + alpha
    peak = -math.log(k * m) / m
    log_peak = peak - 1.0 / m

    def f(s):
        return math.exp(s - k * math.exp(m * s) - log_peak)

    # both tails below exp(-45) of the peak value
    lo = peak - 1.0 / m - 45.0
    t = 1.0
    while math.exp(m * t) / m - t < 1.0 / m + 45.0:
        t *= 2.0
    total, err = 0.0, 0.0
    for a, b in ((lo, peak), (peak, peak + t)):
        val, e = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=400)
        total += val
        err += e
    if not total > 0 or err > 1e-9 * total:
        raise NumericalFailureError(f"quadrature error {err:g} too large for c={c}, alpha={alpha}")
    return math.log(total) + log_peak


def scale_function_oracle(p):
    """Escape probability to ``+inf`` for ``dX = a(X) dt + dW`` from 0.

    With ``S_pm = int_0^inf exp(-2 c_pm u^(1+alpha)/(1+alpha)) du`` the
    scale function gives ``p_plus = S_minus / (S_plus + S_minus)``.
    """
    if not p.alpha > -1:
        raise InvalidArgumentError("the scale-function integrals diverge for alpha <= -1")
    # S_minus / (S_plus + S_minus) from logs; S_pm alone can overflow near alpha = -1
    diff = _log_escape_mass(p.c_plus, p.alpha) - _log_escape_mass(p.c_minus, p.alpha)
    return 1.0 / (1.0 + math.exp(diff)) if diff < 700 else 0.0


def growth_rate_fit(path, window, c, alpha, n_points=200):
    """Log-log fit of ``|X|`` against ``t`` on a log-spaced sub-grid.

    ``c`` is the drift constant on the side the path escaped to; it only
    enters the theoretical reference values.
    """
    t_lo, t_hi = window
    idx = log_spaced_indices(path, t_lo, t_hi, n_points)
    t = path.t_start + path.dt * idx
    x = path.values[idx]
    if np.any(x == 0):
        raise InvalidArgumentError("path vanishes inside the fit window")
    fit = loglog_fit(t, x)
    expo = 1.0 / (1.0 - alpha)
    return GrowthFit(fit.slope, fit.intercept, fit.r_squared, expo,
                     (abs(c) * (1.0 - alpha)) ** expo)


@dataclass(frozen=True)
class PathGrowth:
    path_index: int
    escape: Escape
    slope: float
    intercept: float
    r_squared: float
    ratio_mean: float
    ratio_min: float
    ratio_max: float


def _growth_rows(config, indices, window, tail_fraction):
    rows = []
    p = config.drift
    for i in indices:
        _, x = simulate(config, i)
        t_tail = x.times[tail_start_index(x, tail_fraction)]
        esc = classify_escape(x, default_escape_threshold(p, t_tail), tail_fraction)
        if esc == Escape.UNDECIDED:
            rows.append(PathGrowth(i, esc, *([math.nan] * 6)))
            continue
        c = p.c_plus if esc == Escape.PLUS else -p.c_minus
        fit = growth_rate_fit(x, window, c, p.alpha)
        r = asymptotic_ratio(x, c, p.alpha, window)
        rows.append(PathGrowth(i, esc, fit.slope, fit.intercept, fit.r_squared,
                               r.mean, r.min, r.max))
    return np.array(rows, dtype=object)


def growth_rate_ensemble(config, n_paths, window, tail_fraction=0.2, jobs=1, force=False):
    """Per-path growth fits for an ensemble; undecided paths carry NaNs."""
    t_lo, t_hi = window
    if not 0 < t_lo < t_hi <= config.horizon:
        raise InvalidArgumentError(f"window [{t_lo}, {t_hi}] must lie in (0, horizon]")
    if int(n_paths) != n_paths or n_paths < 1:
        raise InvalidArgumentError(f"n_paths must be a positive integer, got {n_paths}")
    _require_regime(config, force)
    return list(_map_paths(_growth_rows, config, int(n_paths), jobs, window, tail_fraction))


def zero_noise_sweep(base, epsilons, n_paths, **kwargs):
    """``estimate_selection`` at each epsilon over the physical horizon of
    ``base``.

    ``base.dt`` is the step at ``base.epsilon``; at another amplitude the
    step becomes ``base.dt * (eps / base.epsilon)^-gamma``, the image of the
    base grid under the space-time rescaling. A fixed step would let the
    discretization, not the noise, decide the escape direction as eps -> 0.
    Returns a list of ``(epsilon, SelectionEstimate)``.
    """
    epsilons = list(epsilons)
    if not epsilons or any(not e > 0 for e in epsilons):
        raise InvalidArgumentError("epsilons must be a non-empty list of positive numbers")
    exps = scaling_exponents(base.drift.alpha, base.noise.beta)
    table = []
    for e in epsilons:
        ratio = float(e) / base.epsilon
        floor = None if base.drift_floor is None else base.drift_floor * ratio ** (-exps.delta)
        cfg = base.with_(epsilon=float(e), dt=base.dt * ratio ** (-exps.gamma), drift_floor=floor)
        table.append((float(e), estimate_selection(cfg, n_paths, **kwargs)))
    return table
