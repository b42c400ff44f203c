"""Zero-noise selection for ODEs with a non-Lipschitz power drift.

Simulates ``X = x0 + int a(X) ds + eps B`` with
``a(x) = (c_plus 1{x>=0} - c_minus 1{x<0}) |x|^alpha`` and self-similar
noise ``B``, rescales paths in space and time, and estimates the
probabilities with which the small-noise limit picks the maximal or the
minimal Peano solution.
"""

from ._errors import (DivergedError, InvalidArgumentError, NumericalFailureError,
                      RegimeViolationError)
from .noise import (GridPath, NoiseModel, rng_stream, sample_brownian_path,
                    sample_fbm_path, sample_path, sample_stable_path,
                    self_similarity_index, verify_self_similarity)
from .scaling import (Escape, RatioStats, RegimeReport, ScalingExponents,
                      asymptotic_ratio, check_regime, classify_escape,
                      default_escape_threshold, rescale_path, scaling_exponents,
                      sup_distance, zoom_rescale)
from .sde import (DriftParams, SimConfig, drift, exact_extremal_solution,
                  integrate_euler, integrate_perturbed_ode, ode_limit_solution,
                  simulate)
from .selection import (GrowthFit, SelectionEstimate, estimate_selection,
                        growth_rate_ensemble, growth_rate_fit,
                        scale_function_oracle, zero_noise_sweep)
from .stats import (LogLogFit, TestReport, empirical_cf, ks_two_sample,
                    loglog_fit, wilson_interval)

__version__ = "0.1.0"
