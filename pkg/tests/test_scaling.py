import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zeronoise import (DriftParams, Escape, GridPath, InvalidArgumentError, NoiseModel,
                       RegimeViolationError, SimConfig, asymptotic_ratio, check_regime,
                       classify_escape, default_escape_threshold, exact_extremal_solution,
                       integrate_perturbed_ode, rescale_path, scaling_exponents, sup_distance,
                       zoom_rescale)
from zeronoise.scaling import envelope_violations, rescaled_marginals, verify_scaling


def grid(f, dt, T):
    t = dt * np.arange(int(round(T / dt)) + 1)
    return GridPath(0.0, dt, f(t))


class TestExponents:
    def test_brownian_half(self):
        e = scaling_exponents(0.5, 0.5)
        assert e.delta == pytest.approx(-4 / 3)
        assert e.gamma == pytest.approx(-2 / 3)

    @pytest.mark.parametrize("alpha, beta", [(0.0, 0.5), (0.5, 0.75), (-0.5, 0.3), (0.9, 2.0)])
    def test_identity(self, alpha, beta):
        e = scaling_exponents(alpha, beta)
        assert 1 + e.delta - e.gamma * beta == pytest.approx(0.0, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(alpha=st.floats(-0.99, 0.99), beta=st.floats(0.05, 5.0))
    def test_identity_property(self, alpha, beta):
        if abs((1 - alpha) * beta - 1) < 1e-6:
            return
        e = scaling_exponents(alpha, beta)
        assert abs(1 + e.delta - e.gamma * beta) <= 1e-9 * max(1.0, abs(e.delta))
        assert e.gamma == pytest.approx((1 - alpha) * e.delta)

    def test_degenerate(self):
        with pytest.raises(InvalidArgumentError):
            scaling_exponents(0.0, 1.0)


class TestRegime:
    @pytest.mark.parametrize("alpha, beta, kind, ok", [
        (0.5, 0.5, "brownian", True),
        (0.0, 0.5, "brownian", True),
        (0.5, 0.75, "stable", True),
        (-0.5, 0.75, "stable", False),
        (0.2, 0.9, "fbm", True),
        (-0.9, 2.0, None, False),
    ])
    def test_examples(self, alpha, beta, kind, ok):
        r = check_regime(alpha, beta, kind)
        print(r)
        assert r.regime_ok is ok
        assert r.condition_value == pytest.approx(alpha + 1 / beta)
        assert r.uniqueness_note

    def test_stable_violation_note(self):
        r = check_regime(-0.5, 0.75, "stable")
        assert "uniqueness fails" in r.uniqueness_note


class TestRescale:
    def test_unit_epsilon_is_identity(self, rng):
        p = GridPath(0.0, 0.01, np.cumsum(rng.standard_normal(1001)))
        q = rescale_path(p, 1.0, scaling_exponents(0.5, 0.5))
        np.testing.assert_array_equal(q.values, p.values)
        assert q.dt == p.dt

    def test_constant_path(self):
        e = scaling_exponents(0.5, 0.5)
        q = rescale_path(GridPath(0.0, 0.1, np.full(101, 3.0)), 0.5, e)
        np.testing.assert_allclose(q.values, 3.0 * 0.5 ** e.delta)

    @pytest.mark.parametrize("alpha, beta, eps", [(0.5, 0.5, 0.1), (0.5, 0.5, 0.5),
                                                  (0.0, 0.5, 0.2), (-0.5, 0.75, 0.3)])
    def test_extremal_fixed_point(self, alpha, beta, eps):
        # (c(1-alpha)t)^(1/(1-alpha)) is invariant because delta + gamma/(1-alpha) = 0
        e = scaling_exponents(alpha, beta)
        src = grid(lambda t: exact_extremal_solution(t, 1.0, alpha), 0.001, 50.0)
        q = rescale_path(src, eps, e, horizon=min(5.0, src.t_end * eps ** e.gamma))
        np.testing.assert_allclose(q.values, exact_extremal_solution(q.times, 1.0, alpha),
                                   rtol=1e-10, atol=1e-12)

    def test_window_too_long(self):
        src = grid(lambda t: t, 0.01, 1.0)
        with pytest.raises(InvalidArgumentError):
            rescale_path(src, 0.1, scaling_exponents(0.5, 0.5), horizon=10.0)


class TestZoom:
    def test_unit_is_identity(self):
        src = grid(lambda t: t ** 2 + t, 0.01, 2.0)
        np.testing.assert_array_equal(zoom_rescale(src, 1.0, 2.0).values, src.values)

    def test_square_is_fixed(self):
        src = grid(lambda t: t ** 2, 0.01, 100.0)
        z = zoom_rescale(src, 100.0, 2.0, horizon=1.0)
        np.testing.assert_allclose(z.values, z.times ** 2, rtol=1e-12, atol=1e-15)

    @pytest.mark.parametrize("n", [1e2, 1e4])
    def test_linear_term_decays(self, n):
        root = math.sqrt(n)
        src = grid(lambda t: t ** 2 + 10 * t, 0.01 * root, root)
        z = zoom_rescale(src, n, 2.0, horizon=1.0)
        d = sup_distance(z, lambda t: t ** 2)
        print(f"n={n:g}: distance {d:.6g}")
        assert d == pytest.approx(10 / root, rel=1e-9)

    def test_semigroup(self):
        src = grid(lambda t: t ** 2 + 10 * t + 3, 0.01, 400.0)
        twice = zoom_rescale(zoom_rescale(src, 10.0, 2.0, horizon=40.0), 20.0, 2.0, horizon=1.0)
        once = zoom_rescale(src, 200.0, 2.0, horizon=1.0, dt=twice.dt)
        np.testing.assert_allclose(twice.values, once.values, rtol=1e-12)


class TestDistanceAndRatio:
    def test_sup_distance(self):
        p = grid(lambda t: t, 0.1, 1.0)
        assert sup_distance(p, lambda t: t) == 0.0
        assert sup_distance(p, lambda t: t + 0.5) == pytest.approx(0.5)

    @pytest.mark.parametrize("alpha, c", [(0.5, 1.0), (0.0, 2.0), (-0.5, 1.0)])
    def test_exact_ratio_is_one(self, alpha, c):
        p = grid(lambda t: exact_extremal_solution(t, c, alpha), 0.1, 1e3)
        r = asymptotic_ratio(p, c, alpha, (10.0, 1e3))
        assert r.mean == pytest.approx(1.0, abs=1e-12)
        assert r.min == pytest.approx(1.0, abs=1e-12) and r.max == pytest.approx(1.0, abs=1e-12)

    def test_minus_side(self):
        p = grid(lambda t: -exact_extremal_solution(t, 2.0, 0.5), 0.1, 100.0)
        assert asymptotic_ratio(p, -2.0, 0.5, (1.0, 100.0)).mean == pytest.approx(1.0)

    def test_euler_sqrt(self):
        y = integrate_perturbed_ode(1.0, 1.0, 0.5, lambda t: 0.0 * t, 1e4, 0.01)
        r = asymptotic_ratio(y, 1.0, 0.5, (1e3, 1e4))
        print(r)
        assert 0.95 <= r.min <= r.max <= 1.05

    def test_window_at_zero(self):
        p = grid(lambda t: t, 0.1, 10.0)
        with pytest.raises(InvalidArgumentError):
            asymptotic_ratio(p, 1.0, 0.0, (0.0, 10.0))


class TestClassify:
    @pytest.mark.parametrize("vals, expected", [
        (np.r_[np.zeros(80), np.full(20, 5.0)], Escape.PLUS),
        (np.r_[np.zeros(80), np.full(20, -5.0)], Escape.MINUS),
        (np.r_[np.zeros(80), np.full(19, 5.0), [0.5]], Escape.UNDECIDED),
        (np.zeros(100), Escape.UNDECIDED),
    ])
    def test_examples(self, vals, expected):
        assert classify_escape(GridPath(0.0, 1.0, vals), 1.0) == expected

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10**6), lam=st.floats(1.0, 1e3), K=st.floats(0.1, 5.0))
    def test_scale_invariance(self, seed, lam, K):
        vals = np.random.default_rng(seed).normal(0, 3, 50).cumsum()
        p = GridPath(0.0, 1.0, vals)
        q = GridPath(0.0, 1.0, lam * vals)
        base = classify_escape(p, K)
        if base != Escape.UNDECIDED:
            assert classify_escape(q, lam * K) == base

    def test_default_threshold(self):
        d = DriftParams(2.0, 1.0, 0.5)
        assert default_escape_threshold(d, 800.0) == pytest.approx(0.2 * 400.0 ** 2)

    def test_bad_arguments(self):
        p = GridPath(0.0, 1.0, np.zeros(10))
        with pytest.raises(InvalidArgumentError):
            classify_escape(p, 0.0)
        with pytest.raises(InvalidArgumentError):
            classify_escape(p, 1.0, tail_fraction=0.0)


class TestVerifyScaling:
    def config(self, **kw):
        base = dict(drift=DriftParams(1.0, 1.0, 0.5), noise=NoiseModel.brownian(), epsilon=1.0,
                    x0=0.0, horizon=2.0, dt=0.01, seed=9)
        base.update(kw)
        return SimConfig(**base)

    def test_marginals_at_unit_epsilon(self):
        cfg = self.config()
        m = rescaled_marginals(cfg, 1.0, [0.5, 2.0], 30)
        assert m.shape == (30, 2)

    def test_small_run_passes(self):
        rows = verify_scaling(self.config(), [0.5], [1.0, 2.0], 400)
        for eps, t, r in rows:
            print(eps, t, r)
        assert len(rows) == 2 and all(r.passed for _, _, r in rows)

    def test_checkpoint_beyond_horizon(self):
        with pytest.raises(InvalidArgumentError):
            verify_scaling(self.config(), [0.5], [3.0], 100)

    def test_regime_violation(self):
        cfg = self.config(drift=DriftParams(1.0, 1.0, -0.5), noise=NoiseModel.stable(4 / 3))
        with pytest.raises(RegimeViolationError):
            verify_scaling(cfg, [0.5], [1.0], 100)


def test_envelope_violations():
    t = np.arange(11.0)
    noise = GridPath(0.0, 1.0, np.where(t == 4, 100.0, 0.0))
    np.testing.assert_array_equal(envelope_violations(noise, 0.5, 0.1), [4])
