import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from zeronoise import (DivergedError, DriftParams, GridPath, InvalidArgumentError, NoiseModel,
                       SimConfig, drift, exact_extremal_solution, integrate_euler,
                       integrate_perturbed_ode, ode_limit_solution, simulate)


def make_config(**kw):
    base = dict(drift=DriftParams(1.0, 1.0, 0.5), noise=NoiseModel.brownian(), epsilon=1.0,
                x0=0.0, horizon=10.0, dt=0.01, seed=1)
    base.update(kw)
    return SimConfig(**base)


def zero_noise(dt, n):
    return GridPath(0.0, dt, np.zeros(n + 1))


class TestDrift:
    @pytest.mark.parametrize("x, expected", [(4.0, 2.0 * 2.0), (-4.0, -3.0 * 2.0),
                                              (0.0, 0.0), (1.0, 2.0)])
    def test_examples(self, x, expected):
        p = DriftParams(2.0, 3.0, 0.5)
        assert drift(x, p) == pytest.approx(expected)

    def test_alpha_zero_is_signed_constant(self):
        p = DriftParams(2.0, 1.0, 0.0)
        np.testing.assert_allclose(drift(np.array([-3.0, -1e-9, 1e-9, 5.0]), p),
                                   [-1.0, -1.0, 2.0, 2.0])
        assert drift(0.0, p) == 0.0

    def test_negative_alpha_needs_floor(self):
        p = DriftParams(1.0, 1.0, -0.5)
        with pytest.raises(InvalidArgumentError):
            drift(0.0, p)
        assert drift(0.0, p, floor=0.01) == pytest.approx(10.0)
        assert drift(-1e-6, p, floor=0.01) == pytest.approx(-10.0)

    @pytest.mark.parametrize("cp, cm, alpha", [(0.0, 1.0, 0.5), (1.0, -1.0, 0.5),
                                               (1.0, 1.0, 1.0), (1.0, 1.0, -1.0)])
    def test_invalid_params(self, cp, cm, alpha):
        with pytest.raises(InvalidArgumentError):
            DriftParams(cp, cm, alpha)

    def test_swapped(self):
        assert DriftParams(2.0, 1.0, 0.3).swapped() == DriftParams(1.0, 2.0, 0.3)


class TestExactSolutions:
    @pytest.mark.parametrize("t, c, alpha, sign, expected", [
        (4.0, 1.0, 0.5, 1, 4.0),
        (4.0, 1.0, 0.5, -1, -4.0),
        (2.0, 3.0, 0.0, 1, 6.0),
        (1.5, 1.0, -0.5, 1, 2.25 ** (2 / 3)),
        (0.0, 1.0, 0.5, 1, 0.0),
    ])
    def test_extremal(self, t, c, alpha, sign, expected):
        assert exact_extremal_solution(t, c, alpha, sign) == pytest.approx(expected)

    def test_extremal_solves_ode(self):
        # y' = c y^alpha checked by central differences
        t = np.linspace(1.0, 10.0, 50)
        h = 1e-5
        for c, alpha in [(1.0, 0.5), (2.0, 0.2), (0.5, -0.5)]:
            y = exact_extremal_solution(t, c, alpha)
            dy = (exact_extremal_solution(t + h, c, alpha)
                  - exact_extremal_solution(t - h, c, alpha)) / (2 * h)
            np.testing.assert_allclose(dy, c * y ** alpha, rtol=1e-7)

    def test_limit_solution(self):
        assert ode_limit_solution(5.0, 1.0, 1, 1.0, 0.5) == pytest.approx(4.0)
        assert ode_limit_solution(5.0, 1.0, -1, 1.0, 0.5) == pytest.approx(-4.0)
        assert ode_limit_solution(0.5, 1.0, 1, 1.0, 0.5) == 0.0
        assert ode_limit_solution(100.0, math.inf, 1, 1.0, 0.5) == 0.0
        t = np.linspace(0, 10, 11)
        np.testing.assert_array_equal(ode_limit_solution(t, 0.0, 1, 1.0, 0.5),
                                      exact_extremal_solution(t, 1.0, 0.5))

    def test_negative_time(self):
        with pytest.raises(InvalidArgumentError):
            exact_extremal_solution(-1.0, 1.0, 0.5)


class TestSimConfig:
    def test_round_trip(self):
        cfg = make_config(drift_floor=0.5)
        assert SimConfig.from_dict(cfg.to_dict()) == cfg

    def test_missing_keys(self):
        d = make_config().to_dict()
        del d["epsilon"], d["seed"]
        with pytest.raises(InvalidArgumentError, match="epsilon, seed"):
            SimConfig.from_dict(d)

    def test_x0_defaults_to_zero(self):
        d = make_config(x0=3.0).to_dict()
        del d["x0"]
        assert SimConfig.from_dict(d).x0 == 0.0

    @pytest.mark.parametrize("kw", [dict(epsilon=0.0), dict(dt=0.0), dict(dt=20.0),
                                    dict(seed=-1), dict(x0=math.nan),
                                    dict(drift=DriftParams(1, 1, -0.5), drift_floor=0.0)])
    def test_invalid(self, kw):
        with pytest.raises(InvalidArgumentError):
            make_config(**kw)

    def test_default_floor(self):
        cfg = make_config(drift=DriftParams(1, 1, -0.5), dt=1e-3)
        assert cfg.floor == pytest.approx(1e-3 ** (1 / 1.5))
        assert make_config().floor == 0.0


class TestEuler:
    def test_zero_noise_alpha_zero_exact(self):
        # dyadic dt keeps every step exact in binary floating point
        cfg = make_config(drift=DriftParams(1.0, 1.0, 0.0), x0=1.0, dt=0.125, horizon=4.0)
        x = integrate_euler(cfg, zero_noise(0.125, cfg.n_steps))
        np.testing.assert_array_equal(x.values, 1.0 + 0.125 * np.arange(33))

    def test_zero_start_stays_zero(self):
        cfg = make_config(x0=0.0)
        x = integrate_euler(cfg, zero_noise(cfg.dt, cfg.n_steps))
        assert np.all(x.values == 0.0)

    def test_converges_to_extremal_branch(self):
        cfg = make_config(x0=1.0, dt=1e-4, horizon=3.0)
        x = integrate_euler(cfg, zero_noise(cfg.dt, cfg.n_steps))
        print("X(3) =", x.at(3.0))
        assert abs(x.at(3.0) - 6.25) <= 1e-2

    def test_first_order(self):
        errs = []
        for dt in (1e-2, 5e-3):
            cfg = make_config(x0=1.0, dt=dt, horizon=3.0)
            x = integrate_euler(cfg, zero_noise(dt, cfg.n_steps))
            errs.append(abs(x.at(3.0) - 6.25))
        print("errors:", errs, "ratio:", errs[0] / errs[1])
        assert 1.5 <= errs[0] / errs[1] <= 2.5

    def test_positive_start_never_crosses(self):
        for alpha in (0.0, 0.3, 0.9):
            cfg = make_config(drift=DriftParams(1.0, 2.0, alpha), x0=0.1)
            x = integrate_euler(cfg, zero_noise(cfg.dt, cfg.n_steps))
            assert np.all(np.diff(x.values) >= 0) and np.all(x.values > 0)

    def test_grid_mismatch(self, rng):
        cfg = make_config()
        with pytest.raises(InvalidArgumentError):
            integrate_euler(cfg, zero_noise(0.02, cfg.n_steps))
        with pytest.raises(InvalidArgumentError):
            integrate_euler(cfg, zero_noise(cfg.dt, cfg.n_steps - 1))

    def test_divergence_reported(self):
        cfg = make_config(horizon=1.0)
        vals = np.zeros(cfg.n_steps + 1)
        vals[40:] = 1e13
        with pytest.raises(DivergedError) as info:
            integrate_euler(cfg, GridPath(0.0, cfg.dt, vals))
        assert info.value.index == 40

    def test_matches_perturbed_ode_bitwise(self, rng):
        cfg = make_config(x0=5.0, epsilon=0.3, horizon=5.0)
        noise, x = simulate(cfg, 4)
        y = integrate_perturbed_ode(cfg.x0, 1.0, 0.5, lambda t: cfg.epsilon * noise.at(t),
                                    cfg.horizon, cfg.dt)
        assert np.all(x.values > 0)
        np.testing.assert_array_equal(x.values, y.values)

    def test_simulate_deterministic(self):
        cfg = make_config()
        _, a = simulate(cfg, 3)
        _, b = simulate(cfg, 3)
        _, c = simulate(cfg, 4)
        np.testing.assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    @pytest.mark.parametrize("alpha, x0", [(0.0, 0.0), (0.5, 0.0), (-0.5, 0.3)])
    def test_mirror_is_reflection(self, alpha, x0):
        # for alpha < 0 the clipped drift at x = 0 breaks the tie toward +,
        # so reflection is only exact away from the origin
        cfg = make_config(drift=DriftParams(2.0, 1.0, alpha), x0=x0)
        mirrored = cfg.with_(drift=cfg.drift.swapped(), x0=-x0)
        n1, x = simulate(cfg, 7)
        n2, y = simulate(mirrored, 7, mirror=True)
        np.testing.assert_array_equal(n2.values, -n1.values)
        assert np.all(x.values != 0.0) or x0 == 0.0
        np.testing.assert_array_equal(y.values, -x.values)


class TestPerturbedODE:
    def test_no_forcing(self):
        y = integrate_perturbed_ode(1.0, 1.0, 0.5, lambda t: 0.0 * t, 3.0, 1e-4)
        assert abs(y.at(3.0) - 6.25) <= 1e-2

    def test_zero_stays_zero(self):
        y = integrate_perturbed_ode(0.0, 1.0, 0.5, lambda t: 0.0 * t, 5.0, 1e-2)
        assert np.all(y.values == 0.0)

    def test_scalar_forcing(self):
        y = integrate_perturbed_ode(1.0, 1.0, 0.5, lambda t: math.sin(t), 1.0, 1e-2)
        z = integrate_perturbed_ode(1.0, 1.0, 0.5, np.sin, 1.0, 1e-2)
        np.testing.assert_array_equal(y.values, z.values)

    @pytest.mark.parametrize("dt", [1e-3, 1e-4, 5e-5])
    def test_counterexample_error_law(self, dt):
        # y = t solves y = int |y|^0.5 + g with g = -t^1.5/1.5 + t. Linearising
        # Euler around it gives e' = e/(2 sqrt t) - dt/(4 sqrt t), so
        # e(t) = -(dt/2)(exp(sqrt t) - 1), largest at the right end
        y = integrate_perturbed_ode(0.0, 1.0, 0.5, lambda t: -t ** 1.5 / 1.5 + t, 10.0, dt)
        err = y.values - y.times
        predicted = -(dt / 2) * np.expm1(np.sqrt(y.times))
        print(f"dt={dt:g}: sup error {np.abs(err).max():.3e}, predicted {abs(predicted[-1]):.3e}")
        assert np.argmax(np.abs(err)) == err.size - 1
        assert err[-1] == pytest.approx(predicted[-1], rel=0.02)

    def test_counterexample_within_tolerance_when_refined(self):
        y = integrate_perturbed_ode(0.0, 1.0, 0.5, lambda t: -t ** 1.5 / 1.5 + t, 10.0, 5e-5)
        assert np.max(np.abs(y.values - y.times)) <= 1e-3

    @settings(max_examples=30, deadline=None)
    @given(alpha=st.floats(0.05, 0.95), x1=st.floats(0.5, 3.0), dx=st.floats(0.0, 2.0),
           a1=st.floats(-0.3, 0.3), da=st.floats(0.0, 0.5), w=st.floats(0.5, 5.0))
    def test_comparison(self, alpha, x1, dx, a1, da, w):
        # x1 <= x2 and g1 <= g2 with g(0) = 0 keep y1 <= y2 on the grid
        g1 = lambda t: a1 * np.sin(w * t)
        g2 = lambda t: a1 * np.sin(w * t) + da * t
        y1 = integrate_perturbed_ode(x1, 1.0, alpha, g1, 5.0, 1e-2)
        y2 = integrate_perturbed_ode(x1 + dx, 1.0, alpha, g2, 5.0, 1e-2)
        assume(y1.values.min() > 0)
        assert np.all(y1.values <= y2.values + 1e-12)

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            integrate_perturbed_ode(0.0, -1.0, 0.5, np.sin, 1.0, 0.1)
        with pytest.raises(InvalidArgumentError):
            integrate_perturbed_ode(0.0, 1.0, 0.5, lambda t: np.where(t > 0.5, np.inf, t), 1.0, 0.1)
