"""Reproducible Monte Carlo experiments over the estimator families.

An experiment is a declarative :class:`ExperimentSpec`: a boundary, a
model, a grid of sample sizes, and a list of estimator configurations
(plain dicts, so specs serialize to JSON unchanged).  Each replicate
``(n, r)`` draws one sample from a dedicated generator seeded by
``(master_seed, n, r)`` and runs *every* estimator on that same sample,
so comparisons across estimators are paired and results do not depend
on the worker count or on which other sizes ran first.

Aggregates per (estimator, n) cell: mean error, root-mean-square error,
sample variance, mean on-graph count, failure count, and wall time.
Failed replicates (:class:`EstimationFailure`) are excluded from the
aggregates; a failure rate above one percent aborts the experiment
because the survivors would be a biased selection.

``fit_rate`` extracts log-log convergence slopes from the aggregate
table and ``coverage_study`` evaluates self-normalized interval
coverage with exact binomial error bars.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.stats import beta as _beta_dist

from . import registry
from .estimators import (
    EstimateReport,
    EstimationFailure,
    LepskiConfig,
    blockwise_ppp,
    blockwise_regression,
    default_tuning_constant,
    lepski_select,
    mle_hoelder,
    mle_monotone,
    oracle_bandwidth,
)
from .inference import self_normalized_ci
from .model import default_band_height, sample_ppp, sample_regression

__all__ = [
    "ExperimentSpec",
    "MCRow",
    "MCResult",
    "RateFit",
    "CoverageReport",
    "replicate_rng",
    "target_functional",
    "run_mc",
    "fit_loglog",
    "fit_rate",
    "coverage_study",
    "emit_csv",
    "emit_json",
    "load_json",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("experiment_id", "estimator", "n", "M", "mean_error", "rmse",
               "variance", "on_graph_mean", "failures", "seconds")


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of a Monte Carlo experiment.

    ``estimators`` is a sequence of dicts with at least ``name`` and
    ``method`` (``blockwise``, ``mle``, ``monotone``, ``lepski`` or
    ``stub``); further keys configure the method: ``beta``, ``R``,
    ``h`` (a number, ``"oracle"``, or a per-``n`` mapping),
    ``intercept``, ``bandwidths``, ``c``, and an optional per-estimator
    ``w`` overriding the experiment weight.  Use lists, numbers and
    strings only so the spec round-trips through JSON.
    """

    g: str
    model: str = "ppp"
    n_grid: tuple = (200,)
    replications: int = 100
    noise: str = "exp:1"
    w: str = "const:1"
    estimators: tuple = field(default_factory=tuple)
    master_seed: int = 0
    experiment_id: str = "experiment"
    alpha: float = 0.05
    keep_replicates: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "estimators",
                           tuple(dict(e) for e in self.estimators))


@dataclass
class MCRow:
    """Aggregates for one (estimator, n) cell; all entries are plain
    Python scalars so the row survives JSON unchanged.

    ``rmse`` and ``variance`` satisfy the accounting identity
    ``rmse**2 == mean_error**2 + (M-1)/M * variance`` (the variance is
    the unbiased sample variance, hence the ``(M-1)/M`` factor); the
    harness asserts it to 1e-12 relative on every cell."""

    experiment_id: str
    estimator: str
    n: int
    M: int
    mean_error: float
    rmse: float
    variance: float | None
    on_graph_mean: float | None
    failures: int
    seconds: float
    theta: float | None = None
    errors: list | None = None


@dataclass
class MCResult:
    spec: ExperimentSpec
    rows: list

    def cell(self, estimator: str, n: int) -> MCRow:
        for row in self.rows:
            if row.estimator == estimator and row.n == n:
                return row
        raise KeyError(f"no cell for estimator={estimator!r}, n={n}")


def replicate_rng(master_seed: int, n: int, r: int) -> np.random.Generator:
    """The generator owned by replicate ``(n, r)``; a fresh stream keyed
    by position, so any subset of replicates can be reproduced."""
    return np.random.default_rng(
        np.random.SeedSequence([int(master_seed), int(n), int(r)]))


def target_functional(g, w, model: str = "ppp", n: int | None = None) -> float:
    """The estimand: ``integral of g * w`` for the point-process model,
    its design-point average for the regression model."""
    if model == "regression":
        if n is None:
            raise ValueError("the regression target needs the design size n")
        x = np.arange(1, n + 1) / n
        return float(np.mean(g(x) * w(x)))
    a, b = w.support
    if w.const_value is not None and g.antiderivative is not None:
        return float(w.const_value * (g.antiderivative(b) - g.antiderivative(a)))
    val, _ = quad(lambda t: float(g(t)) * w(t), a, b, epsabs=1e-12, limit=200)
    return float(val)


# ----------------------------------------------------------------------
# estimator dispatch


def _estimator_weight(est: dict, payload: dict):
    return registry.weight(est.get("w", payload["w"]))


def _resolve_h(h, n: int, beta, R, model: str) -> float:
    if h == "oracle":
        return oracle_bandwidth(n, beta, R, regression=(model == "regression"))
    if isinstance(h, dict):
        key = str(n) if str(n) in h else n
        return float(h[key])
    return float(h)


def _resolve_bandwidths(bw, n: int) -> tuple:
    if isinstance(bw, dict):
        key = str(n) if str(n) in bw else n
        bw = bw[key]
    return tuple(float(v) for v in bw)


def _apply_estimator(est: dict, sample, noise, payload: dict,
                     n: int, target: float):
    method = est["method"]
    w = _estimator_weight(est, payload)
    model = payload["model"]
    if method == "stub":
        return EstimateReport(theta_hat=float(target), method="stub",
                              on_graph=np.empty(0, dtype=int), sigma_sq=0.0)
    if method == "blockwise":
        h = _resolve_h(est["h"], n, est.get("beta"), est.get("R"), model)
        if model == "ppp":
            return blockwise_ppp(sample, est["beta"], est["R"], w, h)
        return blockwise_regression(sample, noise, w, h,
                                    beta=est.get("beta"), R=est.get("R"),
                                    intercept=est.get("intercept", "class"))
    if method == "mle":
        lam = noise.lam if model == "regression" else None
        return mle_hoelder(sample, est["beta"], est["R"], w, lam=lam)
    if method == "monotone":
        lam = noise.lam if model == "regression" else None
        return mle_monotone(sample, w, lam=lam)
    if method == "lepski":
        if model != "regression":
            raise ValueError("the bandwidth selector is defined for "
                             "regression data")
        cfg = LepskiConfig(
            bandwidths=_resolve_bandwidths(est["bandwidths"], n),
            c=float(est.get("c", default_tuning_constant(noise.lam))))
        return lepski_select(sample, noise, w, cfg)
    raise ValueError(f"unknown estimator method {method!r}")


def _band_for(payload: dict, n: int) -> float:
    """Band height covering the estimators' thresholds with slack; the
    estimators extend the band themselves in the rare overshoot."""
    R = max((e["R"] for e in payload["estimators"] if "R" in e), default=0.0)
    hs = []
    for e in payload["estimators"]:
        if e["method"] == "blockwise":
            hs.append(_resolve_h(e["h"], n, e.get("beta"), e.get("R"), "ppp"))
    return default_band_height(n, R, h_min=min(hs) if hs else None)


def _run_replicate(args):
    payload, n, r, band, targets = args
    g = registry.boundary(payload["g"])
    model = payload["model"]
    noise = registry.noise(payload["noise"]) if model == "regression" else None
    rng = replicate_rng(payload["master_seed"], n, r)
    if model == "ppp":
        sample = sample_ppp(g, n, band, rng)
    else:
        sample = sample_regression(g, n, noise, rng)
    out = []
    for est, target in zip(payload["estimators"], targets):
        start = time.perf_counter()
        try:
            report = _apply_estimator(est, sample, noise, payload, n, target)
            out.append((float(report.theta_hat),
                        float(report.on_graph_count),
                        time.perf_counter() - start))
        except EstimationFailure:
            out.append((None, None, time.perf_counter() - start))
    return out


def run_mc(spec: ExperimentSpec) -> MCResult:
    """Run the experiment and return one aggregate row per
    (estimator, n) cell, in spec order."""
    if spec.model not in ("ppp", "regression"):
        raise ValueError(f"unknown model {spec.model!r}")
    if spec.replications < 2:
        raise ValueError("need at least two replications")
    if any(b <= a for a, b in zip(spec.n_grid, spec.n_grid[1:])):
        raise ValueError(f"n_grid must be strictly increasing, "
                         f"got {spec.n_grid}")
    if not spec.estimators:
        raise ValueError("need at least one estimator")
    names = [e.get("name", e["method"]) for e in spec.estimators]
    if len(set(names)) != len(names):
        raise ValueError(f"estimator names are not unique: {names}")

    payload = {"g": spec.g, "model": spec.model, "noise": spec.noise,
               "w": spec.w, "master_seed": spec.master_seed,
               "estimators": list(spec.estimators)}
    g = registry.boundary(spec.g)
    M = spec.replications
    rows = []
    for n in spec.n_grid:
        band = _band_for(payload, n) if spec.model == "ppp" else None
        targets = [target_functional(g, _estimator_weight(e, payload),
                                     spec.model, n)
                   for e in spec.estimators]
        tasks = [(payload, n, r, band, targets) for r in range(M)]
        if spec.workers > 1:
            chunk = max(1, M // (8 * spec.workers))
            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                results = list(pool.map(_run_replicate, tasks,
                                        chunksize=chunk))
        else:
            results = [_run_replicate(t) for t in tasks]
        for j, est in enumerate(spec.estimators):
            cells = [res[j] for res in results]
            values = np.array([c[0] for c in cells if c[0] is not None])
            failures = M - values.size
            if failures > 0.01 * M:
                raise EstimationFailure(
                    f"estimator {names[j]!r} failed on {failures} of {M} "
                    f"replicates at n={n}; aggregates would be selective")
            errors = values - targets[j]
            on_graph = np.array([c[1] for c in cells if c[1] is not None])
            rmse = float(np.sqrt(np.mean(errors ** 2)))
            # variance of the errors == variance of the estimates, but
            # centering first avoids cancellation around a large theta
            variance = float(np.var(errors, ddof=1)) \
                if errors.size > 1 else None
            if variance is not None:
                m = errors.size
                recomposed = errors.mean() ** 2 + (m - 1) / m * variance
                assert abs(rmse ** 2 - recomposed) \
                    <= 1e-12 * max(rmse ** 2, 1e-300)
            rows.append(MCRow(
                experiment_id=spec.experiment_id,
                estimator=names[j],
                n=int(n),
                M=int(values.size),
                mean_error=float(errors.mean()),
                rmse=rmse,
                variance=variance,
                on_graph_mean=float(on_graph.mean()),
                failures=int(failures),
                seconds=float(sum(c[2] for c in cells)),
                theta=float(targets[j]),
                errors=[float(e) for e in errors]
                if spec.keep_replicates else None,
            ))
    return MCResult(spec=spec, rows=rows)


# ----------------------------------------------------------------------
# rate fits


@dataclass(frozen=True)
class RateFit:
    slope: float
    stderr: float
    intercept: float


def fit_loglog(ns, values) -> RateFit:
    """Least-squares slope of ``log(values)`` against ``log(ns)`` with
    its standard error; needs at least three positive points."""
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if ns.size != values.size or ns.size < 3:
        raise ValueError("need at least three (n, value) pairs")
    if np.any(values <= 0) or np.any(ns <= 0):
        raise ValueError("rate fits need positive sizes and values")
    x, y = np.log(ns), np.log(values)
    xc = x - x.mean()
    sxx = float(np.dot(xc, xc))
    slope = float(np.dot(xc, y) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - intercept - slope * x
    stderr = float(np.sqrt(np.dot(resid, resid) / (ns.size - 2) / sxx))
    return RateFit(slope=slope, stderr=stderr, intercept=intercept)


def fit_rate(result: MCResult, estimator: str,
             quantity: str = "rmse") -> RateFit:
    """Convergence-rate fit for one estimator's ``rmse`` or
    ``variance`` column across the size grid."""
    if quantity not in ("rmse", "variance"):
        raise ValueError(f"quantity must be 'rmse' or 'variance', "
                         f"got {quantity!r}")
    cells = [r for r in result.rows if r.estimator == estimator]
    if not cells:
        raise KeyError(f"no rows for estimator {estimator!r}")
    ns = [r.n for r in cells]
    values = [getattr(r, quantity) for r in cells]
    if any(v is None for v in values):
        raise ValueError(f"{quantity} is undefined for some cells "
                         f"of {estimator!r}")
    return fit_loglog(ns, values)


# ----------------------------------------------------------------------
# interval coverage


@dataclass(frozen=True)
class CoverageReport:
    """Empirical interval coverage.  Degenerate intervals (no on-graph
    observation, so the normalizer is zero) count as misses in
    ``coverage`` and are tallied in ``degenerate``; replicates where the
    estimator itself failed are dropped and tallied in ``failures``."""

    n: int
    replications: int
    valid: int
    hits: int
    coverage: float
    lo: float
    hi: float
    mean_halfwidth: float
    degenerate: int
    failures: int


def coverage_study(g: str, estimator: dict, n: int, replications: int,
                   alpha: float = 0.05, model: str = "ppp",
                   noise: str = "exp:1", w: str = "const:1",
                   master_seed: int = 0,
                   confidence: float = 0.95) -> CoverageReport:
    """Empirical coverage of the self-normalized interval, with an exact
    (Clopper-Pearson) confidence range for the hit probability."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"miscoverage must be in (0, 1), got alpha={alpha}")
    if not 0.0 < confidence < 1.0:
        raise ValueError("the binomial confidence level must be in (0, 1)")
    payload = {"g": g, "model": model, "noise": noise, "w": w,
               "master_seed": master_seed, "estimators": [estimator]}
    gfun = registry.boundary(g)
    noise_model = registry.noise(noise) if model == "regression" else None
    target = target_functional(gfun, _estimator_weight(estimator, payload),
                               model, n)
    band = _band_for(payload, n) if model == "ppp" else None
    hits = failures = degenerate = 0
    halfwidths = []
    for r in range(replications):
        rng = replicate_rng(master_seed, n, r)
        if model == "ppp":
            sample = sample_ppp(gfun, n, band, rng)
        else:
            sample = sample_regression(gfun, n, noise_model, rng)
        try:
            report = _apply_estimator(estimator, sample, noise_model,
                                      payload, n, target)
        except EstimationFailure:
            failures += 1
            continue
        if report.on_graph_count == 0:
            degenerate += 1
            continue
        ci = self_normalized_ci(report, alpha)
        hits += ci.covers(target)
        halfwidths.append(ci.halfwidth)
    valid = replications - failures
    if valid == 0:
        raise EstimationFailure("every replication failed")
    tail = (1.0 - confidence) / 2.0
    lo = float(_beta_dist.ppf(tail, hits, valid - hits + 1)) if hits else 0.0
    hi = float(_beta_dist.ppf(1.0 - tail, hits + 1, valid - hits)) \
        if hits < valid else 1.0
    return CoverageReport(n=int(n), replications=int(replications),
                          valid=int(valid), hits=int(hits),
                          coverage=hits / valid, lo=lo, hi=hi,
                          mean_halfwidth=float(np.mean(halfwidths))
                          if halfwidths else 0.0,
                          degenerate=int(degenerate),
                          failures=int(failures))


# ----------------------------------------------------------------------
# persistence


def emit_csv(result: MCResult, path) -> None:
    """Write the aggregate table; columns are fixed and empty strings
    stand for missing values."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            rec = asdict(row)
            writer.writerow(["" if rec[c] is None else rec[c]
                             for c in CSV_COLUMNS])


def emit_json(result: MCResult, path) -> None:
    """Write the full result: the spec and every row, including kept
    per-replicate errors."""
    doc = {"spec": asdict(result.spec),
           "rows": [asdict(r) for r in result.rows]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_json(path) -> MCResult:
    doc = json.loads(Path(path).read_text())
    spec = ExperimentSpec(**doc["spec"])
    return MCResult(spec=spec, rows=[MCRow(**r) for r in doc["rows"]])
