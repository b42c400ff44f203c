"""Space-time rescaling, regime checks and asymptotic diagnostics."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._errors import InvalidArgumentError, RegimeViolationError
from .noise import BROWNIAN, FBM, STABLE, GridPath
from .sde import simulate
from .stats import ks_two_sample


@dataclass(frozen=True)
class ScalingExponents:
    """Exponents of ``X~(t) = eps^delta X(eps^-gamma t)``."""

    delta: float
    gamma: float


def scaling_exponents(alpha, beta):
    """Exponents that turn the noise amplitude into 1.

    ``delta = 1/((1-alpha) beta - 1)``, ``gamma = (1-alpha) delta``; at these
    values ``1 + delta - gamma beta = 0``.
    """
    denom = (1.0 - alpha) * beta - 1.0
    if denom == 0.0:
        raise InvalidArgumentError(f"(1 - alpha) beta = 1 at alpha={alpha}, beta={beta}")
    delta = 1.0 / denom
    gamma = (1.0 - alpha) * delta
    residual = 1.0 + delta - gamma * beta
    assert abs(residual) <= 1e-9 * max(1.0, abs(delta)), residual
    return ScalingExponents(delta, gamma)


@dataclass(frozen=True)
class RegimeReport:
    alpha: float
    beta: float
    condition_value: float
    regime_ok: bool
    uniqueness_note: str

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta,
                "condition_value": self.condition_value,
                "regime_ok": self.regime_ok, "uniqueness_note": self.uniqueness_note}


def check_regime(alpha, beta, noise_kind=None):
    """Check ``alpha + 1/beta > 1`` and summarise what is known about
    pathwise uniqueness for the given noise."""
    if not -1.0 < alpha < 1.0 or not beta > 0:
        raise InvalidArgumentError(f"need alpha in (-1, 1) and beta > 0, got {alpha}, {beta}")
    value = alpha + 1.0 / beta
    ok = value > 1.0
    if noise_kind == BROWNIAN:
        note = "Brownian noise: unique strong solution for every alpha > -1."
    elif noise_kind == STABLE:
        note = ("symmetric stable noise: unique solution iff alpha + 1/beta > 1"
                if ok else "symmetric stable noise: uniqueness fails when alpha + 1/beta < 1.")
    elif noise_kind == FBM:
        if alpha >= 0 and ok:
            note = "fBm noise: unique strong solution (alpha >= 0, alpha + 1/H > 1)."
        elif alpha < 0:
            note = "fBm noise: uniqueness only known for alpha >= 0."
        else:
            note = "fBm noise: alpha + 1/H <= 1, uniqueness not guaranteed."
    else:
        note = "regime holds" if ok else "alpha + 1/beta <= 1: outside the selection regime"
    return RegimeReport(alpha, beta, value, ok, note)


def _resample(path, src_times, scale, t_start, dt, n):
    idx = path.index_of(src_times)
    if idx.min() < 0 or idx.max() > path.n_steps:
        raise InvalidArgumentError("rescaled window exceeds the source grid")
    return GridPath(t_start, dt, scale * path.values[idx])


def _window_points(path, time_factor, horizon, dt):
    if dt is None:
        dt = path.dt / time_factor
    if horizon is None:
        horizon = path.t_end / time_factor
    if not dt > 0 or not horizon > 0:
        raise InvalidArgumentError("output dt and horizon must be positive")
    n = int(math.floor(horizon / dt + 1e-9))
    return dt, n


def rescale_path(path, epsilon, exps, horizon=None, dt=None):
    """Return ``t -> eps^delta X(eps^-gamma t)`` by nearest-grid lookup.

    Default output grid maps every node onto a source node, so no
    resampling error is introduced.
    """
    if not epsilon > 0:
        raise InvalidArgumentError(f"epsilon must be positive, got {epsilon}")
    time_factor = epsilon ** (-exps.gamma)
    dt, n = _window_points(path, time_factor, horizon, dt)
    t = dt * np.arange(n + 1)
    return _resample(path, time_factor * t, epsilon ** exps.delta, 0.0, dt, n)


def zoom_rescale(path, n, A, horizon=None, dt=None):
    """Return ``t -> path(n^(1/A) t) / n``."""
    if not n > 0 or not A > 0:
        raise InvalidArgumentError(f"need n > 0 and A > 0, got n={n}, A={A}")
    time_factor = n ** (1.0 / A)
    dt, m = _window_points(path, time_factor, horizon, dt)
    t = dt * np.arange(m + 1)
    return _resample(path, time_factor * t, 1.0 / n, 0.0, dt, m)


def sup_distance(path, reference):
    """``max_k |path_k - reference(t_k)|`` over the grid."""
    ref = np.asarray(reference(path.times), dtype=float)
    if not np.all(np.isfinite(ref)):
        raise InvalidArgumentError("reference is not finite on the grid")
    return float(np.max(np.abs(path.values - ref)))


def log_spaced_indices(path, t_lo, t_hi, n_points=200):
    """Distinct grid indices close to a geometric grid on ``[t_lo, t_hi]``."""
    if not 0 < t_lo < t_hi:
        raise InvalidArgumentError(f"need 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]")
    if t_lo < path.t_start - 0.5 * path.dt or t_hi > path.t_end + 0.5 * path.dt:
        raise InvalidArgumentError("window lies outside the grid")
    idx = np.unique(path.index_of(np.geomspace(t_lo, t_hi, n_points)))
    idx = idx[(idx >= 0) & (idx <= path.n_steps)]
    return idx[path.t_start + path.dt * idx > 0]


@dataclass(frozen=True)
class RatioStats:
    mean: float
    min: float
    max: float


def asymptotic_ratio(path, c, alpha, window, n_points=200):
    """Statistics of ``path(t) / (c (1-alpha) t)^(1/(1-alpha))`` on a
    log-spaced sub-grid of ``window``. Pass ``-c_minus`` for the minus side."""
    t_lo, t_hi = window
    if not t_lo > 0:
        raise InvalidArgumentError("window must stay away from t = 0")
    idx = log_spaced_indices(path, t_lo, t_hi, n_points)
    t = path.t_start + path.dt * idx
    ref = math.copysign(1.0, c) * (abs(c) * (1.0 - alpha) * t) ** (1.0 / (1.0 - alpha))
    ratio = path.values[idx] / ref
    return RatioStats(float(ratio.mean()), float(ratio.min()), float(ratio.max()))


class Escape(enum.IntEnum):
    MINUS = -1
    UNDECIDED = 0
    PLUS = 1


def default_escape_threshold(drift, t_tail):
    """One fifth of the slower extremal solution at the start of the tail."""
    c = min(drift.c_plus, drift.c_minus)
    return 0.2 * (c * (1.0 - drift.alpha) * t_tail) ** (1.0 / (1.0 - drift.alpha))


def classify_escape(path, K, tail_fraction=0.2):
    """PLUS if the last ``tail_fraction`` of the path stays above ``K``,
    MINUS if it stays below ``-K``, else UNDECIDED."""
    if not K > 0:
        raise InvalidArgumentError(f"threshold must be positive, got {K}")
    if not 0 < tail_fraction <= 1:
        raise InvalidArgumentError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    tail = tail_start_index(path, tail_fraction)
    seg = path.values[tail:]
    if seg.min() > K:
        return Escape.PLUS
    if seg.max() < -K:
        return Escape.MINUS
    return Escape.UNDECIDED


def tail_start_index(path, tail_fraction):
    n = path.values.size
    return min(n - 1, int(math.floor(n * (1.0 - tail_fraction))))


def envelope_violations(noise, beta, margin, M=1.0):
    """Grid indices where ``|B(t)| > M + t^(beta + margin)``.

    Empirical proxy for the growth envelope a self-similar noise obeys
    eventually; a non-empty result late in the path flags a horizon that
    is too short for the asymptotic statements to apply.
    """
    t = noise.times
    return np.flatnonzero(np.abs(noise.values) > M + t ** (beta + margin))


def rescaled_marginals(config, epsilon, checkpoints, n_samples, stream=()):
    """Samples of ``eps^delta X_eps(eps^-gamma t)`` at each checkpoint.

    ``X_eps`` is simulated with amplitude ``epsilon`` on the step
    ``eps^-gamma * config.dt``, i.e. the image of the reference grid, and
    started at ``x0 eps^-delta`` so that the rescaled path starts at
    ``config.x0``. Returns an array of shape ``(n_samples, len(checkpoints))``.
    """
    checkpoints = np.asarray(checkpoints, dtype=float)
    if checkpoints.size == 0 or np.any(checkpoints <= 0):
        raise InvalidArgumentError("checkpoints must be positive")
    if checkpoints.max() > config.horizon * (1 + 1e-12):
        raise InvalidArgumentError(
            f"checkpoint {checkpoints.max()} exceeds the horizon {config.horizon}")
    exps = scaling_exponents(config.drift.alpha, config.noise.beta)
    factor = epsilon ** (-exps.gamma)
    floor = None if config.drift_floor is None else config.drift_floor * epsilon ** (-exps.delta)
    t_max = float(checkpoints.max())
    cfg = config.with_(epsilon=float(epsilon), x0=config.x0 * epsilon ** (-exps.delta),
                       dt=config.dt * factor, horizon=t_max * factor, drift_floor=floor)
    out = np.empty((int(n_samples), checkpoints.size))
    for i in range(int(n_samples)):
        _, x = simulate(cfg, i, stream=stream)
        y = rescale_path(x, epsilon, exps, horizon=t_max, dt=config.dt)
        out[i] = y.at(checkpoints)
    return out


def verify_scaling(config, epsilons, checkpoints, n_samples, significance=0.01, force=False):
    """KS comparison of the rescaled ``X_eps`` marginals against ``X_1``.

    Every epsilon and the reference use independent streams. Returns rows
    ``(epsilon, t, TestReport)``.
    """
    report = check_regime(config.drift.alpha, config.noise.beta, config.noise.kind)
    if not report.regime_ok and not force:
        raise RegimeViolationError(
            f"alpha + 1/beta = {report.condition_value:.4g} <= 1; pass force=True to override")
    if int(n_samples) != n_samples or n_samples < 25:
        raise InvalidArgumentError(f"n_samples must be an integer >= 25, got {n_samples}")
    epsilons = [float(e) for e in epsilons]
    if not epsilons or any(not e > 0 for e in epsilons):
        raise InvalidArgumentError("epsilons must be positive")
    checkpoints = [float(t) for t in checkpoints]
    ref = rescaled_marginals(config, 1.0, checkpoints, n_samples, stream=(1, 0))
    rows = []
    for j, eps in enumerate(epsilons):
        sample = rescaled_marginals(config, eps, checkpoints, n_samples, stream=(1, j + 1))
        for k, t in enumerate(checkpoints):
            rows.append((eps, t, ks_two_sample(sample[:, k], ref[:, k], significance)))
    return rows
