"""Deterministic forcing: y = x0 + c int |y|^alpha ds + g(t).

A forcing that grows slower than the extremal solution does not change the
growth rate. A forcing that is too large can pin the solution to another
curve: with g = -t^1.5/1.5 + t the exact solution is y = t, not t^2/4.
"""

import numpy as np

from zeronoise import asymptotic_ratio, integrate_perturbed_ode

for alpha, power in [(0.5, 0.4), (-0.5, 0.3)]:
    y = integrate_perturbed_ode(1.0, 1.0, alpha, lambda t: t ** power, 1e6, 0.5)
    r = asymptotic_ratio(y, 1.0, alpha, (1e5, 1e6))
    print(f"alpha={alpha:+.1f}, g=t^{power}: y / extremal on [1e5, 1e6] in [{r.min:.4f}, {r.max:.4f}]")

print("\ncounterexample, sup |y - t| on [0, 10]:")
for dt in (1e-3, 1e-4, 5e-5):
    y = integrate_perturbed_ode(0.0, 1.0, 0.5, lambda t: -t ** 1.5 / 1.5 + t, 10.0, dt)
    err = np.abs(y.values - y.times).max()
    print(f"  dt={dt:g}: {err:.3e}  (first-order prediction {dt / 2 * np.expm1(np.sqrt(10)):.3e})")
