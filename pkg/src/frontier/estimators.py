"""Estimators of the weighted boundary functional.

All estimators target the linear functional ``integral of g * w`` (or
its design-point Riemann sum in the regression model) and share a
correction principle: observations that realize the fitted lower
boundary are each biased upward by one vertical spacing, so the fitted
integral is debiased by a count of boundary observations.

Four families are provided.

* Blockwise averaging: within each block of width ``h`` the boundary is
  estimated from the block minimum, with a shift correction summed over
  observations below a block threshold.  Unbiased for the functional at
  every bandwidth; bandwidth selection trades the threshold height
  against the in-block sample size.
* A fully data-driven bandwidth selector that compares blockwise
  estimates across a bandwidth grid against critical values built from
  an empirical exponential-moment penalty.
* Shape-constrained maximum likelihood for smoothness classes: the
  fitted boundary is the lower cone envelope of the data.
* Shape-constrained maximum likelihood for monotone boundaries: the
  fitted boundary is the running suffix minimum.

Estimators accept either sample type where the definition makes sense;
regression variants require the noise density at the origin ``lam``.
Data-dependent impossibilities (an empty block, a sample that cannot
support the weight) raise :class:`EstimationFailure`; invalid
configuration raises ``ValueError``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .envelope import (
    build_cone_envelope,
    build_step_envelope,
    integrate_envelope,
    on_graph_sites,
)
from .model import NoiseModel, PointSample, RegressionSample, WeightFunction
from .registry import cosine_weight

__all__ = [
    "EstimationFailure",
    "EstimateReport",
    "BlockReport",
    "LepskiConfig",
    "LepskiReport",
    "SeriesReport",
    "blockwise_ppp",
    "blockwise_regression",
    "lepski_select",
    "penalty_transform",
    "critical_value",
    "mle_hoelder",
    "mle_monotone",
    "series_estimator",
    "oracle_bandwidth",
]


class EstimationFailure(RuntimeError):
    """The sample does not admit the requested estimate.

    Raised for data-dependent degeneracies (an empty block, no
    observations over the weight's support) as opposed to invalid
    configuration.  ``block`` identifies the offending block when the
    failure is blockwise.
    """

    def __init__(self, message: str, block: int | None = None):
        super().__init__(message)
        self.block = block


@dataclass
class EstimateReport:
    """Result of an envelope-based estimate."""

    theta_hat: float
    method: str
    on_graph: np.ndarray = field(repr=False, default=None)
    sigma_sq: float | None = None
    envelope: object = field(repr=False, default=None)

    @property
    def on_graph_count(self) -> int:
        return int(self.on_graph.size)

    @property
    def sigma_hat(self) -> float:
        return float(np.sqrt(self.sigma_sq))


@dataclass
class BlockReport:
    """Result of a blockwise estimate."""

    theta_hat: float
    method: str
    h: float
    block_minima: np.ndarray = field(repr=False, default=None)
    block_counts: np.ndarray = field(repr=False, default=None)

    @property
    def on_graph_count(self) -> int:
        """Total observations below the block thresholds; these play the
        role the on-graph count plays for the envelope estimators."""
        return int(self.block_counts.sum())


@dataclass
class LepskiReport:
    """Result of the data-driven bandwidth selection."""

    theta_hat: float
    method: str
    chosen_h: float
    chosen_index: int
    bandwidths: np.ndarray
    estimates: np.ndarray
    kappas: np.ndarray
    block: BlockReport = field(repr=False, default=None)

    @property
    def on_graph_count(self) -> int:
        return self.block.on_graph_count


@dataclass
class SeriesReport:
    """Estimated coefficients against the cosine basis.

    ``coefficients[m]`` estimates the integral of ``g`` against the
    ``m``-th basis function; calling the report evaluates the projection
    estimate of ``g`` itself.
    """

    coefficients: np.ndarray
    method: str
    on_graph_count: int

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m, c in enumerate(self.coefficients):
            out = out + c * cosine_weight(m)(x)
        return out


# ----------------------------------------------------------------------
# blockwise estimators


def _block_count(h: float) -> int:
    K = round(1.0 / h)
    if K < 1 or abs(K - 1.0 / h) > 1e-9 * K:
        raise ValueError(
            f"bandwidth {h!r} does not split [0, 1) into whole blocks")
    return K


def blockwise_ppp(sample: PointSample, beta: float, R: float,
                  w: WeightFunction, h: float) -> BlockReport:
    """Blockwise estimate from point-process data.

    Block ``k`` contributes ``(Y*_k + R h**beta) * integral of w`` over
    the block minus ``1/n`` times the sum of ``w`` over points below the
    threshold ``Y*_k + R h**beta``, where ``Y*_k`` is the block minimum.
    """
    if not isinstance(sample, PointSample):
        raise TypeError("blockwise_ppp expects point-process data")
    K = _block_count(h)
    shift = R * h ** beta
    edges = np.arange(K + 1) * h
    edges[-1] = 1.0
    for _ in range(32):
        idx = np.searchsorted(sample.x, edges)
        sizes = np.diff(idx)
        if np.any(sizes == 0):
            k = int(np.flatnonzero(sizes == 0)[0])
            raise EstimationFailure(
                f"no observations in block {k} of {K} at bandwidth {h:g}",
                block=k)
        minima = np.minimum.reduceat(sample.y, idx[:-1])
        thresholds = minima + shift
        if not np.isfinite(sample.band_height):
            break
        short = [k for k in range(K)
                 if thresholds[k] > sample.band_floor(edges[k], edges[k + 1])]
        if not short:
            break
        for k in short:
            sample.ensure_band(thresholds[k], edges[k], edges[k + 1])
    else:  # pragma: no cover - the band grows by >= 1 per round
        raise EstimationFailure("band extension did not stabilize")

    below = sample.y <= np.repeat(thresholds, sizes)
    wx = np.where(below, w(sample.x), 0.0)
    corrections = np.add.reduceat(wx, idx[:-1])
    counts = np.add.reduceat(below.astype(float), idx[:-1]).astype(int)
    # reduceat is identity on empty slices; none exist past the check above
    w_over_block = np.array([w.integral(edges[k], edges[k + 1])
                             for k in range(K)])
    theta = float(np.sum(thresholds * w_over_block) -
                  corrections.sum() / sample.n)
    return BlockReport(theta_hat=theta, method="blockwise-ppp", h=h,
                       block_minima=minima, block_counts=counts)


def _regression_blocks(sample: RegressionSample, h: float):
    n = sample.n
    m = round(n * h)
    if m < 1 or abs(m - n * h) > 1e-9 * m:
        raise ValueError(
            f"bandwidth {h!r} is not a whole number of design points over n={n}")
    _block_count(h)
    if m * round(1.0 / h) != n:
        raise ValueError(
            f"bandwidth {h!r} does not tile the design 1/n..1 evenly")
    return sample.y.reshape(n // m, m)


def blockwise_regression(sample: RegressionSample, noise: NoiseModel,
                         w: WeightFunction, h: float,
                         beta: float | None = None, R: float | None = None,
                         intercept: str = "class") -> BlockReport:
    """Blockwise estimate from regression data.

    Observations are truncated at the block minimum plus an intercept
    ``b`` and each truncated observation is debiased by ``1/lam``:
    block ``k`` contributes ``(1/n) * sum of (min(y_i, Y*_k + b) -
    (1/lam) * 1{y_i <= Y*_k + b}) * w(i/n)``.  ``intercept="class"``
    uses ``b = R h**beta``; ``intercept="adaptive"`` uses ``b = 1/(nh)``,
    which needs no knowledge of the smoothness class.
    """
    if not isinstance(sample, RegressionSample):
        raise TypeError("blockwise_regression expects regression data")
    rows = _regression_blocks(sample, h)
    if intercept == "class":
        if beta is None or R is None:
            raise ValueError("the class intercept needs beta and R")
        b = R * h ** beta
    elif intercept == "adaptive":
        b = 1.0 / (sample.n * h)
    else:
        raise ValueError(f"unknown intercept rule {intercept!r}")
    minima = rows.min(axis=1)
    thresholds = (minima + b)[:, None]
    below = rows <= thresholds
    clipped = np.minimum(rows, thresholds) - below / noise.lam
    wx = w(sample.x).reshape(rows.shape)
    theta = float(np.sum(clipped * wx) / sample.n)
    return BlockReport(theta_hat=theta, method=f"blockwise-regression-{intercept}",
                       h=h, block_minima=minima,
                       block_counts=below.sum(axis=1))


def oracle_bandwidth(n: float, beta: float, R: float,
                     regression: bool = False) -> float:
    """Rate-optimal bandwidth ``(2 beta R n)**(-1/(beta+1))``, rounded to
    the nearest admissible value.

    Point-process blocks only need ``1/h`` to be a whole number; the
    regression design additionally needs ``n h`` whole, so the block
    size is rounded to the divisor of ``n`` nearest on the log scale.
    """
    if not (n > 0 and R > 0 and 0 < beta <= 1):
        raise ValueError("need n > 0, R > 0 and beta in (0, 1]")
    target = (2.0 * beta * R * n) ** (-1.0 / (beta + 1.0))
    if not regression:
        return 1.0 / max(round(1.0 / target), 1)
    n = int(round(n))
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    m = min(divisors, key=lambda d: abs(np.log(d / (n * target))))
    return m / n


# ----------------------------------------------------------------------
# data-driven bandwidth selection


@dataclass(frozen=True)
class LepskiConfig:
    """Bandwidth grid (ascending) and tuning constant for the critical
    values.  The default ``c`` follows the theory and is conservative at
    practical sample sizes; the admissibility of ``c`` against the
    penalty's domain is validated at selection time."""

    bandwidths: tuple
    c: float


def default_tuning_constant(lam: float) -> float:
    return max(5.0 / lam, 2.0) + 0.5


def penalty_transform(x: float, y) -> np.ndarray:
    """The empirical penalty ``H_x(y) = log(1 - 2x|y|)/(-2x) - |y|``.

    Nonnegative and increasing in ``|y|``; finite only while
    ``2x|y| < 1``.  ``H_x(0) = 0`` exactly.
    """
    y = np.abs(np.asarray(y, dtype=float))
    if x < 0:
        raise ValueError(f"penalty scale must be nonnegative, got {x}")
    if x == 0:
        return np.zeros_like(y)
    u = 2.0 * x * y
    if np.any(u >= 1.0):
        raise ValueError(
            f"penalty argument out of range: 2*x*|y| reaches {float(np.max(u)):g}"
            " >= 1; decrease the tuning constant or refine the grid")
    return np.log1p(-u) / (-2.0 * x) - y


def critical_value(sample: RegressionSample, noise: NoiseModel,
                   w: WeightFunction, h: float, c: float) -> float:
    """Critical value for one bandwidth: an empirical penalty over the
    observations below the adaptive block thresholds, plus deterministic
    terms covering the noise law's deviation from exponential and the
    minimum's fluctuation."""
    n, lam = sample.n, noise.lam
    logn = c * np.log(n)
    x = np.sqrt(logn)
    rows = _regression_blocks(sample, h)
    thresholds = rows.min(axis=1) + 1.0 / (n * h)
    below = rows <= thresholds[:, None]
    wx = w(sample.x)
    penalties = penalty_transform(x, np.sqrt(h) * wx)
    empirical = float(
        np.sum(below.reshape(-1) * penalties) / (n * lam * np.sqrt(h)))
    wbar1 = float(np.mean(np.abs(wx)))
    quad_term = (noise.quad_const * logn) ** 2 * wbar1 / ((n * h) ** 2 * lam)
    min_term = x / (2.0 * n * lam * np.sqrt(h))
    return empirical + quad_term + min_term


def _select_bandwidth(estimates, kappas) -> int:
    """Index of the selected bandwidth: the first ``m`` such that some
    coarser-or-equal estimate differs from the next finer one by more
    than the sum of their critical values; the last index if none does.
    Ties do not trigger."""
    M = len(estimates)
    for m in range(M - 1):
        for mp in range(m + 1):
            if abs(estimates[mp] - estimates[m + 1]) > kappas[m + 1] + kappas[mp]:
                return m
    return M - 1


def lepski_select(sample: RegressionSample, noise: NoiseModel,
                  w: WeightFunction, config: LepskiConfig) -> LepskiReport:
    """Estimate with a fully data-driven bandwidth.

    Runs the adaptive-intercept blockwise estimator on the whole grid,
    computes the critical values, and keeps the smallest bandwidth whose
    estimate is compatible with every finer one.
    """
    hs = np.asarray(config.bandwidths, dtype=float)
    if hs.size < 1 or np.any(np.diff(hs) <= 0):
        raise ValueError("bandwidths must be strictly increasing")
    reports = [blockwise_regression(sample, noise, w, h, intercept="adaptive")
               for h in hs]
    kappas = np.array([critical_value(sample, noise, w, h, config.c)
                       for h in hs])
    estimates = np.array([r.theta_hat for r in reports])
    j = _select_bandwidth(estimates, kappas)
    return LepskiReport(theta_hat=float(estimates[j]),
                        method="blockwise-regression-lepski",
                        chosen_h=float(hs[j]), chosen_index=j,
                        bandwidths=hs, estimates=estimates, kappas=kappas,
                        block=reports[j])


# ----------------------------------------------------------------------
# shape-constrained maximum likelihood


def _exact_cone_envelope(sample: PointSample, beta: float, R: float):
    """Cone envelope of the sample, extending the band until the
    envelope provably matches the one of the untruncated process.

    Branches of unobserved points lie above ``g + T`` pointwise (their
    apex does, and the class modulus dominates the variation of ``g``),
    so it suffices that the computed envelope stays below ``g + T``.
    """
    for _ in range(32):
        env = build_cone_envelope(sample.x, sample.y, beta, R)
        if not np.isfinite(sample.band_height):
            return env
        bounds, owners = env.bounds, env.owners
        peaks = np.maximum(env(bounds[:-1]), env(bounds[1:]))
        short = [p for p in range(owners.size)
                 if peaks[p] > sample.band_floor(bounds[p], bounds[p + 1])]
        if not short:
            return env
        for p in short:
            sample.ensure_band(peaks[p], bounds[p], bounds[p + 1])
    raise EstimationFailure("band extension did not stabilize")


def mle_hoelder(sample, beta: float, R: float, w: WeightFunction,
                lam: float | None = None, tol: float = 1e-9) -> EstimateReport:
    """Maximum-likelihood estimate over the smoothness class.

    Point-process data: integrate the cone envelope against ``w`` and
    subtract ``1/n`` times the sum of ``w`` over on-graph points.
    Regression data: average ``envelope - (1/lam) * 1{on graph}`` times
    ``w`` over the design; requires ``lam``.
    """
    if isinstance(sample, PointSample):
        if len(sample) == 0:
            raise EstimationFailure("empty sample")
        env = _exact_cone_envelope(sample, beta, R)
        og = on_graph_sites(env)
        integral = integrate_envelope(env, w, tol)
        wg = w(env.site_x[og])
        theta = integral - float(wg.sum()) / sample.n
        sigma_sq = float(np.dot(wg, wg)) / sample.n ** 2
        return EstimateReport(theta_hat=theta, method="mle-hoelder",
                              on_graph=og, sigma_sq=sigma_sq, envelope=env)
    if isinstance(sample, RegressionSample):
        if lam is None:
            raise ValueError("regression estimates need the noise slope lam")
        env = build_cone_envelope(sample.x, sample.y, beta, R)
        rival = np.minimum(env.min_left, env.min_right)
        fitted = np.minimum(sample.y, rival)
        og_mask = sample.y <= rival
        wx = w(sample.x)
        theta = float(np.sum((fitted - og_mask / lam) * wx) / sample.n)
        og = np.flatnonzero(og_mask)
        sigma_sq = float(np.dot(wx[og], wx[og])) / (sample.n * lam) ** 2
        return EstimateReport(theta_hat=theta, method="mle-hoelder",
                              on_graph=og, sigma_sq=sigma_sq, envelope=env)
    raise TypeError(f"unsupported sample type {type(sample).__name__}")


def mle_monotone(sample, w: WeightFunction,
                 lam: float | None = None, tol: float = 1e-9) -> EstimateReport:
    """Maximum-likelihood estimate over nondecreasing boundaries.

    The fitted boundary is the suffix minimum, infinite past the last
    observation, so point-process data require the weight's support to
    end before the last observed abscissa.
    """
    if isinstance(sample, PointSample):
        if len(sample) == 0:
            raise EstimationFailure("empty sample")
        env = build_step_envelope(sample.x, sample.y)
        if w.support[1] > env.domain_end:
            raise EstimationFailure(
                f"no observations beyond {env.domain_end:g}, but the weight "
                f"is supported up to {w.support[1]:g}")
        og = on_graph_sites(env)
        integral = integrate_envelope(env, w, tol)
        wg = w(env.site_x[og])
        theta = integral - float(wg.sum()) / sample.n
        sigma_sq = float(np.dot(wg, wg)) / sample.n ** 2
        return EstimateReport(theta_hat=theta, method="mle-monotone",
                              on_graph=og, sigma_sq=sigma_sq, envelope=env)
    if isinstance(sample, RegressionSample):
        if lam is None:
            raise ValueError("regression estimates need the noise slope lam")
        fitted = np.minimum.accumulate(sample.y[::-1])[::-1]
        og_mask = sample.y <= fitted
        wx = w(sample.x)
        theta = float(np.sum((fitted - og_mask / lam) * wx) / sample.n)
        og = np.flatnonzero(og_mask)
        sigma_sq = float(np.dot(wx[og], wx[og])) / (sample.n * lam) ** 2
        return EstimateReport(theta_hat=theta, method="mle-monotone",
                              on_graph=og, sigma_sq=sigma_sq, envelope=None)
    raise TypeError(f"unsupported sample type {type(sample).__name__}")


def series_estimator(sample, M: int, beta: float, R: float,
                     lam: float | None = None, tol: float = 1e-9) -> SeriesReport:
    """Coefficient estimates against the first ``M`` cosine-basis
    functions, sharing a single fitted envelope across all of them."""
    if M < 1:
        raise ValueError(f"need at least one coefficient, got M={M}")
    weights = [cosine_weight(m) for m in range(M)]
    if isinstance(sample, PointSample):
        if len(sample) == 0:
            raise EstimationFailure("empty sample")
        env = _exact_cone_envelope(sample, beta, R)
        og = on_graph_sites(env)
        coeff = [integrate_envelope(env, wm, tol)
                 - float(wm(env.site_x[og]).sum()) / sample.n
                 for wm in weights]
        return SeriesReport(coefficients=np.array(coeff),
                            method="series-mle", on_graph_count=og.size)
    if isinstance(sample, RegressionSample):
        if lam is None:
            raise ValueError("regression estimates need the noise slope lam")
        env = build_cone_envelope(sample.x, sample.y, beta, R)
        rival = np.minimum(env.min_left, env.min_right)
        fitted = np.minimum(sample.y, rival)
        og_mask = sample.y <= rival
        coeff = [float(np.sum((fitted - og_mask / lam) * wm(sample.x))
                       / sample.n) for wm in weights]
        return SeriesReport(coefficients=np.array(coeff),
                            method="series-mle",
                            on_graph_count=int(og_mask.sum()))
    raise TypeError(f"unsupported sample type {type(sample).__name__}")
