"""Which way does the noise push the solution out of zero?

With a(x) = (c+ 1{x>=0} - c- 1{x<0}) |x|^alpha the noiseless equation started
at 0 has infinitely many solutions. Brownian noise picks one side at random.
This script estimates P(escape to +inf) and sets it against the value given
by the scale function of the diffusion.
"""

import os

from zeronoise import DriftParams, NoiseModel, SimConfig, estimate_selection, scale_function_oracle

jobs = os.cpu_count() or 1

for cp, cm, alpha in [(1.0, 1.0, 0.5), (2.0, 1.0, 0.0), (3.0, 1.0, 0.5)]:
    drift = DriftParams(cp, cm, alpha)
    cfg = SimConfig(drift, NoiseModel.brownian(), epsilon=1.0, x0=0.0,
                    horizon=200.0, dt=0.01, seed=7)
    est = estimate_selection(cfg, 1000, jobs=jobs)
    oracle = scale_function_oracle(drift)
    print(f"c+={cp} c-={cm} alpha={alpha:+.1f}: p+ = {est.p_plus_hat:.3f} "
          f"[{est.ci_low:.3f}, {est.ci_high:.3f}], scale function {oracle:.4f}, "
          f"undecided {est.n_undecided}")

# For alpha < 0 the drift is clipped at |x| = dt^(1/(1-alpha)) and x = 0 counts
# as positive, so the first steps lean to the + side. The bias fades slowly.
drift = DriftParams(1.0, 2.0, -0.5)
print(f"\nc+=1 c-=2 alpha=-0.5, scale function {scale_function_oracle(drift):.4f}")
for dt in (1e-2, 1e-3, 1e-4):
    cfg = SimConfig(drift, NoiseModel.brownian(), epsilon=1.0, x0=0.0, horizon=20.0, dt=dt, seed=7)
    est = estimate_selection(cfg, 400, jobs=jobs)
    print(f"  dt={dt:g}: p+ = {est.p_plus_hat:.3f} [{est.ci_low:.3f}, {est.ci_high:.3f}]")
