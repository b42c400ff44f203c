"""Singular drift, exact Peano solutions and explicit Euler integration.

The drift is ``a(x) = (c_plus 1{x >= 0} - c_minus 1{x < 0}) |x|^alpha``.
For ``alpha < 0`` it is unbounded at the origin, so the integrator evaluates
``|x|`` clipped from below at ``drift_floor``. When the clipped magnitude is
exactly 0 the drift is 0 for every alpha (``|x|^alpha sign x`` form), which
matters only for ``alpha = 0``, where ``0**0 = 1`` would otherwise give every
path started at the origin a deterministic first kick of ``c_plus * dt``.
"""

import math
from dataclasses import dataclass, replace

import numba
import numpy as np

from ._errors import DivergedError, InvalidArgumentError
from .noise import GridPath, NoiseModel, rng_stream, sample_path

BLOWUP = 1e12


@dataclass(frozen=True)
class DriftParams:
    c_plus: float
    c_minus: float
    alpha: float

    def __post_init__(self):
        if not self.c_plus > 0 or not self.c_minus > 0:
            raise InvalidArgumentError(
                f"c_plus and c_minus must be positive, got {self.c_plus}, {self.c_minus}")
        if not -1.0 < self.alpha < 1.0:
            raise InvalidArgumentError(f"alpha must lie in (-1, 1), got {self.alpha}")

    def swapped(self):
        return DriftParams(self.c_minus, self.c_plus, self.alpha)

    def to_dict(self):
        return {"c_plus": self.c_plus, "c_minus": self.c_minus, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(float(d["c_plus"]), float(d["c_minus"]), float(d["alpha"]))
        except KeyError as exc:
            raise InvalidArgumentError(f"drift is missing {exc.args[0]!r}") from None


def default_floor(alpha, dt):
    """Clipping radius for the drift: ``dt^(1/(1-alpha))`` when alpha < 0, else 0."""
    return dt ** (1.0 / (1.0 - alpha)) if alpha < 0 else 0.0


@dataclass(frozen=True)
class SimConfig:
    """One simulation of ``X = x0 + int a(X) ds + epsilon B``.

    ``drift_floor=None`` selects :func:`default_floor`.
    """

    drift: DriftParams
    noise: NoiseModel
    epsilon: float
    x0: float
    horizon: float
    dt: float
    seed: int
    drift_floor: float = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidArgumentError(f"epsilon must be positive, got {self.epsilon}")
        if not self.horizon > 0 or not self.dt > 0:
            raise InvalidArgumentError("horizon and dt must be positive")
        if self.dt > self.horizon:
            raise InvalidArgumentError(f"dt={self.dt} exceeds horizon={self.horizon}")
        if not math.isfinite(self.x0):
            raise InvalidArgumentError("x0 must be finite")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidArgumentError(f"seed must be a non-negative integer, got {self.seed}")
        if self.drift_floor is not None:
            if not self.drift_floor >= 0:
                raise InvalidArgumentError("drift_floor must be non-negative")
            if self.drift.alpha < 0 and self.drift_floor == 0:
                raise InvalidArgumentError("drift_floor must be positive when alpha < 0")

    @property
    def n_steps(self):
        return max(1, int(round(self.horizon / self.dt)))

    @property
    def floor(self):
        if self.drift_floor is None:
            return default_floor(self.drift.alpha, self.dt)
        return self.drift_floor

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {
            "drift": self.drift.to_dict(),
            "noise": self.noise.to_dict(),
            "epsilon": self.epsilon,
            "x0": self.x0,
            "horizon": self.horizon,
            "dt": self.dt,
            "seed": self.seed,
            "drift_floor": self.drift_floor,
        }

    @classmethod
    def from_dict(cls, d):
        """Build from a parsed config document.

        ``epsilon``, ``seed`` and the drift and noise blocks have no
        defaults; ``x0`` defaults to 0 and ``drift_floor`` to the
        self-similar microscale.
        """
        missing = [k for k in ("drift", "noise", "epsilon", "horizon", "dt", "seed") if k not in d]
        if missing:
            raise InvalidArgumentError(f"config is missing required keys: {', '.join(missing)}")
        floor = d.get("drift_floor")
        return cls(
            drift=DriftParams.from_dict(d["drift"]),
            noise=NoiseModel.from_dict(d["noise"]),
            epsilon=float(d["epsilon"]),
            x0=float(d.get("x0", 0.0)),
            horizon=float(d["horizon"]),
            dt=float(d["dt"]),
            seed=int(d["seed"]),
            drift_floor=None if floor is None else float(floor),
        )


def drift(x, p, floor=0.0):
    """Evaluate the singular drift; ``x`` may be a scalar or an array."""
    x = np.asarray(x, dtype=float)
    if floor < 0:
        raise InvalidArgumentError("floor must be non-negative")
    mag = np.maximum(np.abs(x), floor)
    if p.alpha < 0 and np.any(mag == 0):
        raise InvalidArgumentError("drift is unbounded at 0 for alpha < 0; pass floor > 0")
    out = np.where(x >= 0, p.c_plus, -p.c_minus) * np.where(mag > 0, mag, 1.0) ** p.alpha
    out = np.where(mag > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def exact_extremal_solution(t, c, alpha, sign=1):
    """``sign * (c (1 - alpha) t)^(1/(1 - alpha))``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidArgumentError("t must be non-negative")
    out = sign * (c * (1.0 - alpha) * t) ** (1.0 / (1.0 - alpha))
    return float(out) if out.ndim == 0 else out


def ode_limit_solution(t, tau, sign, c, alpha):
    """Peano solution that sits at 0 until ``tau`` and then follows the
    extremal branch shifted to start at ``tau``. ``tau=inf`` gives 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not tau >= 0:
        raise InvalidArgumentError("t and tau must be non-negative")
    shifted = np.clip(t - tau, 0.0, None) if math.isfinite(tau) else np.zeros_like(t)
    out = sign * (c * (1.0 - alpha) * shifted) ** (1.0 / (1.0 - alpha))
    return float(out) if out.ndim == 0 else out


@numba.njit(cache=True, nogil=True)
def _euler_kernel(x0, increments, dt, c_pos, c_neg, alpha, floor, blowup, out):
    # a(x) = c_pos m^alpha for x >= 0, -c_neg m^alpha otherwise, m = max(|x|, floor)
    x = x0
    out[0] = x
    for k in range(increments.size):
        m = abs(x)
        if m < floor:
            m = floor
        if m == 0.0:
            a = 0.0
        elif x >= 0.0:
            a = c_pos * m ** alpha
        else:
            a = -c_neg * m ** alpha
        x = x + a * dt + increments[k]
        if not abs(x) <= blowup:
            return k + 1
        out[k + 1] = x
    return -1


def _integrate(x0, increments, dt, c_pos, c_neg, alpha, floor):
    if alpha < 0 and not floor > 0:
        raise InvalidArgumentError("floor must be positive when alpha < 0")
    increments = np.ascontiguousarray(increments, dtype=float)
    out = np.empty(increments.size + 1)
    bad = _euler_kernel(float(x0), increments, float(dt), float(c_pos), float(c_neg),
                        float(alpha), float(floor), BLOWUP, out)
    if bad >= 0:
        raise DivergedError(f"path left |x| <= {BLOWUP:g} at step {bad}", bad)
    return GridPath(0.0, dt, out)


def integrate_euler(config, noise):
    """Explicit Euler for the noisy equation on the grid of ``noise``.

    The noise contribution of step k is ``eps B_{k+1} - eps B_k``.
    """
    if not math.isclose(noise.dt, config.dt, rel_tol=1e-12):
        raise InvalidArgumentError(f"noise dt {noise.dt} differs from config dt {config.dt}")
    if noise.n_steps < config.n_steps:
        raise InvalidArgumentError("noise path does not cover the horizon")
    scaled = config.epsilon * noise.values[: config.n_steps + 1]
    p = config.drift
    return _integrate(config.x0, np.diff(scaled), config.dt,
                      p.c_plus, p.c_minus, p.alpha, config.floor)


def _evaluate_forcing(g, ts):
    try:
        vals = np.asarray(g(ts), dtype=float)
    except TypeError:
        vals = None
    if vals is None or vals.shape != ts.shape:
        vals = np.array([float(g(t)) for t in ts])
    if not np.all(np.isfinite(vals)):
        raise InvalidArgumentError("forcing g is not finite on the grid")
    return vals


def integrate_perturbed_ode(x0, c, alpha, g, T, dt, floor=None):
    """Euler scheme for ``y = x0 + c int |y|^alpha ds + g(t)``.

    ``g`` is called once with the full time grid; scalar-only callables are
    evaluated pointwise. The drift has no sign switch here: it is
    ``c |y|^alpha`` on both half-lines.
    """
    if not dt > 0 or not T > 0:
        raise InvalidArgumentError("T and dt must be positive")
    if not c > 0 or not -1.0 < alpha < 1.0:
        raise InvalidArgumentError("need c > 0 and alpha in (-1, 1)")
    if floor is None:
        floor = default_floor(alpha, dt)
    n = max(1, int(round(T / dt)))
    ts = dt * np.arange(n + 1)
    forcing = _evaluate_forcing(g, ts)
    return _integrate(x0, np.diff(forcing), dt, c, -c, alpha, floor)


def simulate(config, path_index=0, mirror=False, stream=()):
    """Simulate path ``path_index`` of the ensemble defined by ``config``.

    Returns ``(noise, x)``. The noise comes from
    ``rng_stream(config.seed, *stream, path_index)``. With ``mirror=True``
    the noise path is negated, which together with swapped drift constants
    yields the reflected path.
    """
    rng = rng_stream(config.seed, *stream, path_index)
    noise = sample_path(config.noise, config.dt, config.n_steps, rng)
    if mirror:
        noise = GridPath(noise.t_start, noise.dt, -noise.values)
    return noise, integrate_euler(config, noise)
