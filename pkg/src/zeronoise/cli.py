"""Command-line front end.

Every command reads a JSON config (``--config``), writes its results into
``--out`` and drops a ``<command>.manifest.json`` next to them. Exit codes:
0 success, 2 invalid input, 3 regime violation, 4 numerical failure.
"""

import argparse
import csv
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from ._errors import InvalidArgumentError, NumericalFailureError, RegimeViolationError
from .noise import (BROWNIAN, FBM, STABLE, GridPath, NoiseModel, check_fbm_covariance,
                    check_increment_correlation, check_stable_cf, rng_stream,
                    verify_self_similarity)
from .scaling import Escape, check_regime, verify_scaling
from .sde import SimConfig, exact_extremal_solution, simulate
from .selection import (estimate_selection, growth_rate_ensemble, growth_rate_fit,
                        scale_function_oracle, zero_noise_sweep)

EXIT_OK, EXIT_INVALID, EXIT_REGIME, EXIT_NUMERICAL = 0, 2, 3, 4


def _num(x):
    """Shortest round-trip text for a float; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) if not isinstance(v, str) else v for v in row])


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _floats(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidArgumentError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise InvalidArgumentError(f"expected at least one number, got {text!r}")
    return vals


def load_config(path, seed=None):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgumentError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidArgumentError("config must be a JSON object")
    if seed is not None:
        doc["seed"] = seed
    classify = doc.pop("classify", {}) or {}
    try:
        return SimConfig.from_dict(doc), classify
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"malformed config: {exc}") from None


def _check_regime(config, force):
    report = check_regime(config.drift.alpha, config.noise.beta, config.noise.kind)
    if not report.regime_ok and not force:
        raise RegimeViolationError(
            f"alpha + 1/beta = {report.condition_value:.6g} <= 1 "
            f"({report.uniqueness_note}); rerun with --force to override")
    return report


class _Run:
    """Collects outputs and writes the manifest for one command."""

    def __init__(self, args, command, config=None):
        self.args = args
        self.command = command
        self.config = config
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.outputs = []
        self.started = datetime.now(timezone.utc).isoformat()

    def path(self, name):
        p = self.out / name
        self.outputs.append(str(p))
        return p

    def finish(self, arguments):
        manifest = {
            "command": self.command,
            "tool_version": __version__,
            "seed": None if self.config is None else self.config.seed,
            "config": None if self.config is None else self.config.to_dict(),
            "arguments": arguments,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "outputs": self.outputs,
        }
        _write_json(self.out / f"{self.command.replace('-', '_')}.manifest.json", manifest)


def _classify_kwargs(args, classify):
    threshold = args.threshold if args.threshold is not None else classify.get("threshold")
    tail = args.tail_fraction if args.tail_fraction is not None else classify.get("tail_fraction", 0.2)
    return {"threshold": threshold, "tail_fraction": float(tail)}


def cmd_simulate(args):
    config, _ = load_config(args.config, args.seed)
    _check_regime(config, args.force)
    run = _Run(args, "simulate", config)
    noise, x = simulate(config, args.path_index)
    _write_csv(run.path("simulate.csv"), ["t", "x", "noise"],
               zip(x.times, x.values, noise.values[: x.values.size]))
    run.finish({"path_index": args.path_index})
    return EXIT_OK


def cmd_estimate_p(args):
    config, classify = load_config(args.config, args.seed)
    _check_regime(config, args.force)
    kw = _classify_kwargs(args, classify)
    run = _Run(args, "estimate-p", config)
    est = estimate_selection(config, args.n_paths, jobs=args.jobs, force=args.force, **kw)
    result = est.to_dict()
    result["epsilon"] = config.epsilon
    if config.noise.kind == BROWNIAN:
        result["oracle_p_plus"] = scale_function_oracle(config.drift)
    _write_json(run.path("estimate_p.json"), result)
    run.finish({"n_paths": args.n_paths, **kw})
    return EXIT_OK


def cmd_zero_noise_sweep(args):
    config, classify = load_config(args.config, args.seed)
    _check_regime(config, args.force)
    kw = _classify_kwargs(args, classify)
    epsilons = _floats(args.epsilons)
    run = _Run(args, "zero-noise-sweep", config)
    table = zero_noise_sweep(config, epsilons, args.n_paths, jobs=args.jobs,
                             force=args.force, **kw)
    oracle = scale_function_oracle(config.drift) if config.noise.kind == BROWNIAN else None
    _write_csv(run.path("zero_noise_sweep.csv"),
               ["epsilon", "n_total", "n_plus", "n_minus", "n_undecided",
                "p_plus_hat", "ci_low", "ci_high", "oracle_p_plus"],
               [(e, s.n_total, s.n_plus, s.n_minus, s.n_undecided,
                 s.p_plus_hat, s.ci_low, s.ci_high, oracle) for e, s in table])
    run.finish({"epsilons": epsilons, "n_paths": args.n_paths, **kw})
    return EXIT_OK


def cmd_verify_scaling(args):
    config, _ = load_config(args.config, args.seed)
    _check_regime(config, args.force)
    epsilons = _floats(args.epsilons)
    checkpoints = _floats(args.checkpoints)
    run = _Run(args, "verify-scaling", config)
    rows = verify_scaling(config, epsilons, checkpoints, args.n_samples,
                          args.significance, force=args.force)
    _write_csv(run.path("verify_scaling.csv"),
               ["epsilon", "t", "statistic", "p_value", "passed"],
               [(e, t, r.statistic, r.p_value, r.passed) for e, t, r in rows])
    run.finish({"epsilons": epsilons, "checkpoints": checkpoints,
                "n_samples": args.n_samples, "significance": args.significance})
    return EXIT_OK


def _self_test_row(config, window):
    p = config.drift
    t = config.dt * np.arange(config.n_steps + 1)
    exact = GridPath(0.0, config.dt, exact_extremal_solution(t, p.c_plus, p.alpha))
    return growth_rate_fit(exact, window, p.c_plus, p.alpha)


def cmd_growth_rate(args):
    config, _ = load_config(args.config, args.seed)
    _check_regime(config, args.force)
    window = _floats(args.window)
    if len(window) != 2 or not 0 < window[0] < window[1] <= config.horizon:
        raise InvalidArgumentError(f"window must be 'lo,hi' with 0 < lo < hi <= horizon, got {args.window}")
    run = _Run(args, "growth-rate", config)
    expo = 1.0 / (1.0 - config.drift.alpha)
    if args.self_test:
        fit = _self_test_row(config, window)
        summary = {"self_test": True, "slope": fit.slope, "intercept": fit.intercept,
                   "r_squared": fit.r_squared, "theory_exponent": fit.theory_exponent,
                   "theory_coefficient": fit.theory_coefficient}
    else:
        rows = growth_rate_ensemble(config, args.n_paths, window, jobs=args.jobs, force=args.force)
        _write_csv(run.path("growth_rate.csv"),
                   ["path_index", "escape", "slope", "intercept", "r_squared",
                    "ratio_mean", "ratio_min", "ratio_max"],
                   [(r.path_index, r.escape.name.lower(), r.slope, r.intercept, r.r_squared,
                     r.ratio_mean, r.ratio_min, r.ratio_max) for r in rows])
        plus = [r for r in rows if r.escape == Escape.PLUS]
        minus = [r for r in rows if r.escape == Escape.MINUS]
        summary = {
            "self_test": False,
            "n_paths": len(rows),
            "n_plus": len(plus),
            "n_minus": len(minus),
            "theory_exponent": expo,
            "median_slope_plus": float(np.median([r.slope for r in plus])) if plus else None,
            "median_ratio_mean_plus": float(np.median([r.ratio_mean for r in plus])) if plus else None,
            "median_slope_minus": float(np.median([r.slope for r in minus])) if minus else None,
            "median_ratio_mean_minus": float(np.median([r.ratio_mean for r in minus])) if minus else None,
        }
    _write_json(run.path("growth_rate_summary.json"), summary)
    run.finish({"n_paths": args.n_paths, "window": window, "self_test": args.self_test})
    return EXIT_OK


NOISE_CHECKS = ("self-similarity", "cf", "covariance", "increments")


def _noise_rows(model, checks, scales, n_samples, significance, seed):
    rows = []
    if "self-similarity" in checks:
        for j, a in enumerate(scales):
            r = verify_self_similarity(model, a, 1.0, n_samples, rng_stream(seed, 0, j), significance)
            rows.append(("self-similarity", f"a={a:g}", r.statistic, r.p_value, r.passed))
    moments = []
    if "cf" in checks and model.kind == STABLE:
        moments += check_stable_cf(model.param, [0.5, 1.0, 2.0], 100 * n_samples, rng_stream(seed, 1))
    if "covariance" in checks and model.kind == FBM:
        pairs = [(1, 2), (1, 4), (2, 3), (3, 8), (8, 8)]
        moments += check_fbm_covariance(model.param, pairs, 10 * n_samples, rng_stream(seed, 2))
    if "increments" in checks and model.kind in (BROWNIAN, FBM):
        moments.append(check_increment_correlation(model, 10 * n_samples, rng_stream(seed, 3)))
    for m in moments:
        # two-sided normal tail of the z-score; pass at 3 standard errors
        p = math.erfc(abs(m.z) / math.sqrt(2.0))
        rows.append((m.label, f"expected={m.expected:.6g}", m.z, p, m.passed()))
    return rows


def cmd_verify_noise(args):
    config = None
    if args.model is not None:
        model = NoiseModel.parse(args.model)
    elif args.config is not None:
        config, _ = load_config(args.config, args.seed)
        model = config.noise
    else:
        raise InvalidArgumentError("verify-noise needs --model or --config")
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = set(checks) - set(NOISE_CHECKS)
    if unknown:
        raise InvalidArgumentError(f"unknown checks: {', '.join(sorted(unknown))}")
    seed = args.seed if args.seed is not None else (config.seed if config else 0)
    scales = _floats(args.scales)
    run = _Run(args, "verify-noise", config)
    rows = _noise_rows(model, checks, scales, args.n_samples, args.significance, seed)
    _write_csv(run.path("verify_noise.csv"),
               ["check", "parameter", "statistic", "p_value", "passed"], rows)
    run.finish({"model": model.to_dict(), "checks": checks, "scales": scales,
                "n_samples": args.n_samples, "significance": args.significance, "seed": seed})
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON simulation config")
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker processes; results do not depend on it")
    common.add_argument("--force", action="store_true",
                        help="run even if alpha + 1/beta <= 1")

    classify = argparse.ArgumentParser(add_help=False)
    classify.add_argument("--threshold", type=float, help="escape threshold K")
    classify.add_argument("--tail-fraction", type=float, help="tail share checked against K")

    parser = argparse.ArgumentParser(prog="zeronoise", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="one path as CSV (t, x, noise)")
    p.add_argument("--path-index", type=int, default=0)
    p.set_defaults(func=cmd_simulate, needs_config=True)

    p = sub.add_parser("estimate-p", parents=[common, classify], help="Monte-Carlo p_plus")
    p.add_argument("--n-paths", type=int, required=True)
    p.set_defaults(func=cmd_estimate_p, needs_config=True)

    p = sub.add_parser("zero-noise-sweep", parents=[common, classify],
                       help="p_plus estimates across noise amplitudes")
    p.add_argument("--epsilons", required=True)
    p.add_argument("--n-paths", type=int, required=True)
    p.set_defaults(func=cmd_zero_noise_sweep, needs_config=True)

    p = sub.add_parser("verify-scaling", parents=[common],
                       help="KS tests of rescaled marginals against epsilon = 1")
    p.add_argument("--epsilons", required=True)
    p.add_argument("--checkpoints", required=True)
    p.add_argument("--n-samples", type=int, default=2000)
    p.add_argument("--significance", type=float, default=0.01)
    p.set_defaults(func=cmd_verify_scaling, needs_config=True)

    p = sub.add_parser("growth-rate", parents=[common], help="per-path log-log growth fits")
    p.add_argument("--n-paths", type=int, default=100)
    p.add_argument("--window", required=True, help="'lo,hi'")
    p.add_argument("--self-test", action="store_true",
                   help="fit the exact extremal solution instead of simulated paths")
    p.set_defaults(func=cmd_growth_rate, needs_config=True)

    p = sub.add_parser("verify-noise", parents=[common], help="noise generator checks")
    p.add_argument("--model", help="brownian | stable:<s> | fbm:<H> (default: config noise)")
    p.add_argument("--checks", default=",".join(NOISE_CHECKS))
    p.add_argument("--scales", default="0.5,2,10")
    p.add_argument("--n-samples", type=int, default=2000)
    p.add_argument("--significance", type=float, default=0.01)
    p.set_defaults(func=cmd_verify_noise, needs_config=False)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.needs_config and args.config is None:
        print(f"zeronoise {args.command}: --config is required", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except RegimeViolationError as exc:
        print(f"zeronoise {args.command}: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except InvalidArgumentError as exc:
        print(f"zeronoise {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailureError as exc:
        print(f"zeronoise {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
