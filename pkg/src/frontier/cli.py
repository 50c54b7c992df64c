"""Command-line front end: sampling, one-shot estimation, experiments.

Five subcommands::

    simulate   draw one sample and write it as x,y CSV rows
    estimate   draw one sample, run one estimator, print a JSON report
    mc         run a Monte Carlo experiment (config file) and emit CSV/JSON
    rates      run an experiment and fit log-log convergence slopes
    coverage   run a confidence-interval coverage study

Experiments are configured by a JSON file whose keys mirror
:class:`frontier.harness.ExperimentSpec`; a handful of flags
(``--master-seed``, ``--replications``, ``--workers``, ...) override the
file, and the flag-only form accepts estimators as inline JSON objects.
Exit codes: 0 success, 1 validation or usage error, 2 estimation
failure.  Every command echoes its effective configuration into its
output so results are auditable.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import registry
from .estimators import EstimationFailure
from .harness import (
    ExperimentSpec,
    coverage_study,
    emit_csv,
    emit_json,
    fit_rate,
    run_mc,
)
from .harness import _apply_estimator, _band_for
from .inference import self_normalized_ci
from .model import default_band_height, sample_ppp, sample_regression

__all__ = ["main", "entry"]


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.split(","))


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frontier", allow_abbrev=False,
        description="boundary-model simulation and estimation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", allow_abbrev=False,
                         help="draw one sample and write x,y CSV rows")
    sim.add_argument("--model", choices=("ppp", "regression"), default="ppp")
    sim.add_argument("--g", required=True,
                     help="boundary id: const:c, sqrt, sin4x")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--band", type=float, default=None,
                     help="band height for the point-process model")
    sim.add_argument("--noise", default="exp:1",
                     help="noise id for the regression model")
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=_cmd_simulate)

    est = sub.add_parser("estimate", allow_abbrev=False,
                         help="draw one sample, estimate, print JSON")
    est.add_argument("--model", choices=("ppp", "regression"), default="ppp")
    est.add_argument("--g", required=True)
    est.add_argument("--n", type=int, required=True)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--band", type=float, default=None)
    est.add_argument("--noise", default="exp:1")
    est.add_argument("--estimator", required=True,
                     choices=("blockwise", "mle", "monotone", "lepski"))
    est.add_argument("--w", default="const:1",
                     help="weight id: const:c[@a,b], cos-basis:m[@a,b]")
    est.add_argument("--beta", type=float, default=None)
    est.add_argument("--R", type=float, default=None)
    est.add_argument("--h", type=float, default=None,
                     help="blockwise bandwidth (omit for the oracle choice)")
    est.add_argument("--intercept", choices=("class", "adaptive"),
                     default="class")
    est.add_argument("--bandwidths", type=_floats, default=None,
                     help="comma-separated grid for the bandwidth selector")
    est.add_argument("--c", type=float, default=None,
                     help="tuning constant for the bandwidth selector")
    est.add_argument("--alpha", type=float, default=0.05)
    est.add_argument("--out", default=None,
                     help="also write the JSON report to this path")
    est.set_defaults(func=_cmd_estimate)

    def experiment_parser(name, help_text):
        p = sub.add_parser(name, allow_abbrev=False, help=help_text)
        p.add_argument("--config", default=None,
                       help="JSON file with experiment fields")
        p.add_argument("--g", default=None)
        p.add_argument("--model", choices=("ppp", "regression"), default=None)
        p.add_argument("--n-grid", type=_ints, default=None)
        p.add_argument("--noise", default=None)
        p.add_argument("--w", default=None)
        p.add_argument("--estimator", action="append", default=None,
                       metavar="JSON",
                       help="inline estimator config, may repeat")
        p.add_argument("--replications", type=int, default=None)
        p.add_argument("--master-seed", type=int, default=None)
        p.add_argument("--experiment-id", default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--keep-replicates", action="store_true",
                       default=None)
        return p

    mc = experiment_parser("mc", "run a Monte Carlo experiment")
    mc.add_argument("--format", choices=("csv", "json"), default="csv")
    mc.add_argument("--out", required=True)
    mc.set_defaults(func=_cmd_mc)

    rates = experiment_parser("rates", "fit log-log convergence slopes")
    rates.add_argument("--quantity", choices=("rmse", "variance"),
                       default="rmse")
    rates.add_argument("--out", default=None)
    rates.set_defaults(func=_cmd_rates)

    cov = sub.add_parser("coverage", allow_abbrev=False,
                         help="confidence-interval coverage study")
    cov.add_argument("--config", required=True,
                     help="JSON file with coverage_study fields")
    cov.add_argument("--master-seed", type=int, default=None)
    cov.add_argument("--replications", type=int, default=None)
    cov.add_argument("--out", default=None)
    cov.set_defaults(func=_cmd_coverage)

    return parser


# ----------------------------------------------------------------------
# subcommands


def _draw_sample(model, g, n, seed, band, noise_id):
    gfun = registry.boundary(g)
    rng = np.random.default_rng(seed)
    if model == "ppp":
        height = band if band is not None \
            else default_band_height(n, gfun.R if gfun.R is not None else 1.0)
        return sample_ppp(gfun, n, height, rng), None, height
    noise = registry.noise(noise_id)
    return sample_regression(gfun, n, noise, rng), noise, None


def _cmd_simulate(args) -> int:
    sample, _, height = _draw_sample(args.model, args.g, args.n, args.seed,
                                     args.band, args.noise)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for xi, yi in zip(sample.x, sample.y):
            writer.writerow([float(xi), float(yi)])
    meta = {"command": "simulate", "model": args.model, "g": args.g,
            "n": args.n, "seed": args.seed, "band": height,
            "noise": args.noise if args.model == "regression" else None,
            "points": int(sample.x.size), "out": str(args.out)}
    print(json.dumps(meta))
    return 0


def _estimator_config(args) -> dict:
    est = {"name": args.estimator, "method": args.estimator, "w": args.w}
    if args.estimator in ("blockwise", "mle"):
        if args.beta is None or args.R is None:
            raise ValueError(f"--estimator {args.estimator} needs "
                             f"--beta and --R")
        est["beta"], est["R"] = args.beta, args.R
    if args.estimator == "blockwise":
        est["h"] = args.h if args.h is not None else "oracle"
        est["intercept"] = args.intercept
    if args.estimator == "lepski":
        if args.bandwidths is None:
            raise ValueError("--estimator lepski needs --bandwidths")
        est["bandwidths"] = list(args.bandwidths)
        if args.c is not None:
            est["c"] = args.c
    return est


def _cmd_estimate(args) -> int:
    est = _estimator_config(args)
    payload = {"g": args.g, "model": args.model, "noise": args.noise,
               "w": args.w, "master_seed": args.seed, "estimators": [est]}
    sample, noise, height = _draw_sample(args.model, args.g, args.n,
                                         args.seed, args.band, args.noise)
    if args.model == "ppp" and args.band is None:
        # make sure the materialized band covers the blockwise threshold
        needed = _band_for(payload, args.n)
        if needed > sample.band_height:
            sample, noise, height = _draw_sample(
                args.model, args.g, args.n, args.seed, needed, args.noise)
    report = _apply_estimator(est, sample, noise, payload, args.n, None)
    out = {"command": "estimate", "method": report.method,
           "theta_hat": float(report.theta_hat),
           "on_graph_count": int(report.on_graph_count)}
    if getattr(report, "sigma_sq", None) is not None \
            and report.on_graph_count > 0:
        ci = self_normalized_ci(report, args.alpha)
        out["sigma_hat"] = float(report.sigma_hat)
        out["ci"] = {"lo": ci.lo, "hi": ci.hi, "level": ci.level}
    if hasattr(report, "chosen_h"):
        out["chosen_h"] = float(report.chosen_h)
        out["bandwidths"] = [float(v) for v in report.bandwidths]
    elif hasattr(report, "h"):
        out["h"] = float(report.h)
    out["config"] = {"model": args.model, "g": args.g, "n": args.n,
                     "seed": args.seed, "estimator": est,
                     "alpha": args.alpha, "band": height,
                     "noise": args.noise
                     if args.model == "regression" else None}
    text = json.dumps(out, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


def _load_experiment_spec(args) -> ExperimentSpec:
    cfg = {}
    if args.config is not None:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise ValueError("the experiment config must be a JSON object")
    for key in ("g", "model", "n_grid", "noise", "w", "replications",
                "master_seed", "experiment_id", "workers",
                "keep_replicates"):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if args.estimator is not None:
        cfg["estimators"] = [json.loads(e) for e in args.estimator]
    if "g" not in cfg:
        raise ValueError("missing required config field: g")
    try:
        return ExperimentSpec(**cfg)
    except TypeError as exc:
        raise ValueError(f"invalid experiment config: {exc}") from None


def _cmd_mc(args) -> int:
    spec = _load_experiment_spec(args)
    result = run_mc(spec)
    if args.format == "csv":
        emit_csv(result, args.out)
    else:
        emit_json(result, args.out)
    print(json.dumps({"command": "mc", "out": str(args.out),
                      "format": args.format, "rows": len(result.rows),
                      "spec": asdict(spec)}))
    return 0


def _cmd_rates(args) -> int:
    spec = _load_experiment_spec(args)
    result = run_mc(spec)
    fits = []
    for est in spec.estimators:
        name = est.get("name", est["method"])
        fit = fit_rate(result, name, args.quantity)
        fits.append({"estimator": name, "slope": fit.slope,
                     "stderr": fit.stderr, "intercept": fit.intercept})
    doc = {"command": "rates", "quantity": args.quantity, "fits": fits,
           "spec": asdict(spec)}
    text = json.dumps(doc, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


_COVERAGE_FIELDS = {"g", "estimator", "n", "replications", "alpha", "model",
                    "noise", "w", "master_seed", "confidence"}


def _cmd_coverage(args) -> int:
    cfg = json.loads(Path(args.config).read_text())
    if not isinstance(cfg, dict):
        raise ValueError("the coverage config must be a JSON object")
    unknown = sorted(set(cfg) - _COVERAGE_FIELDS)
    if unknown:
        raise ValueError(f"unknown coverage config field: {', '.join(unknown)}")
    for key in ("master_seed", "replications"):
        value = getattr(args, key)
        if value is not None:
            cfg[key] = value
    missing = sorted({"g", "estimator", "n", "replications"} - set(cfg))
    if missing:
        raise ValueError(f"missing coverage config field: "
                         f"{', '.join(missing)}")
    report = coverage_study(**cfg)
    doc = {"command": "coverage", "report": asdict(report), "config": cfg}
    text = json.dumps(doc, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


# ----------------------------------------------------------------------
# entry


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except EstimationFailure as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main(sys.argv[1:]))
