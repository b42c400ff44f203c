"""Check the three noise generators against their defining properties.

Brownian motion, symmetric stable Levy motion and fractional Brownian motion
are all self-similar: B(a t) has the law of a^beta B(t). The script runs
that KS check for each model, then compares the stable characteristic
function and the fBm covariance with their closed forms.
"""

from zeronoise import NoiseModel, rng_stream, verify_self_similarity
from zeronoise.noise import check_fbm_covariance, check_stable_cf

models = [NoiseModel.brownian(), NoiseModel.stable(4 / 3), NoiseModel.fbm(0.3)]

print("self-similarity, KS two-sample at 1%")
for j, model in enumerate(models):
    for a in (0.5, 2.0, 10.0):
        r = verify_self_similarity(model, a, 1.0, 2000, rng_stream(1, j, int(10 * a)))
        print(f"  {model.kind:8s} beta={model.beta:.3f} a={a:>4}: D={r.statistic:.4f} "
              f"p={r.p_value:.3f} {'ok' if r.passed else 'REJECTED'}")

print("\nstable characteristic function, E exp(i lam X) = exp(-|lam|^s)")
for c in check_stable_cf(1.5, [0.5, 1.0, 2.0], 100_000, rng_stream(2)):
    print(f"  {c.label:22s} estimate={c.estimate:+.4f} expected={c.expected:+.4f} z={c.z:+.2f}")

print("\nfBm covariance, H=0.75")
for c in check_fbm_covariance(0.75, [(1, 2), (2, 3), (3, 8)], 20_000, rng_stream(3)):
    print(f"  {c.label:22s} estimate={c.estimate:.4f} expected={c.expected:.4f} z={c.z:+.2f}")
