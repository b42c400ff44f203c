"""After leaving zero the path follows the extremal solution.

An escaped path grows like (c (1-alpha) t)^(1/(1-alpha)) no matter how rough
the noise is, as long as the noise grows slower. Here the noise is a 4/3-stable
Levy motion and alpha=0.5, so paths should grow like t^2/4.
"""

import os

import numpy as np

from zeronoise import DriftParams, Escape, NoiseModel, SimConfig, growth_rate_ensemble

cfg = SimConfig(DriftParams(1.0, 1.0, 0.5), NoiseModel.stable(4 / 3), epsilon=1.0, x0=0.0,
                horizon=1e4, dt=0.1, seed=5)
rows = growth_rate_ensemble(cfg, 60, (1e2, 1e4), jobs=os.cpu_count() or 1)
for side in (Escape.PLUS, Escape.MINUS):
    sel = [r for r in rows if r.escape == side]
    if sel:
        print(f"{side.name.lower():5s}: {len(sel):2d} paths, median slope "
              f"{np.median([r.slope for r in sel]):.3f} (theory 2), median X/extremal "
              f"{np.median([r.ratio_mean for r in sel]):.3f}")
