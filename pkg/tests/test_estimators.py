"""Estimator values on hand-sized samples, frozen from paper-and-pencil
computation, plus structural checks (failure modes, equivariance, and an
independent re-implementation of the critical values)."""

import math

import numpy as np
import pytest

from frontier.estimators import (
    EstimationFailure,
    LepskiConfig,
    _select_bandwidth,
    blockwise_ppp,
    blockwise_regression,
    critical_value,
    lepski_select,
    mle_hoelder,
    mle_monotone,
    oracle_bandwidth,
    penalty_transform,
    series_estimator,
)
from frontier.model import (
    PointSample,
    RegressionSample,
    noise_exponential,
    noise_uniform01,
    sample_ppp,
)
from frontier.registry import boundary, weight

W1 = weight("const:1")


def _points(x, y, n):
    return PointSample(x=np.asarray(x, float), y=np.asarray(y, float), n=n)


# ----------------------------------------------------------------------
# blockwise, point-process model


def test_blockwise_ppp_hand_value():
    # two blocks of width 1/2; thresholds 0.7 and 0.6; corrections 2/4
    # and 1/4; total (0.7 + 0.6)/2 - 3/4 = -0.1
    s = _points([0.1, 0.3, 0.6, 0.8], [0.2, 0.5, 0.1, 0.7], n=4)
    rep = blockwise_ppp(s, beta=1.0, R=1.0, w=W1, h=0.5)
    assert rep.theta_hat == pytest.approx(-0.1, abs=1e-14)
    assert list(rep.block_minima) == [0.2, 0.1]
    assert list(rep.block_counts) == [2, 1]
    assert rep.on_graph_count == 3
    assert rep.h == 0.5


def test_blockwise_ppp_single_block():
    s = _points([0.1, 0.3, 0.6, 0.8], [0.2, 0.5, 0.1, 0.7], n=4)
    rep = blockwise_ppp(s, beta=1.0, R=1.0, w=W1, h=1.0)
    # threshold 1.1 catches everything: 1.1 - 4/4
    assert rep.theta_hat == pytest.approx(0.1, abs=1e-14)


def test_blockwise_ppp_empty_block():
    s = _points([0.1, 0.2], [0.3, 0.4], n=2)
    with pytest.raises(EstimationFailure) as info:
        blockwise_ppp(s, beta=1.0, R=1.0, w=W1, h=0.5)
    assert info.value.block == 1


def test_blockwise_ppp_bad_bandwidth():
    s = _points([0.1], [0.3], n=1)
    with pytest.raises(ValueError):
        blockwise_ppp(s, beta=1.0, R=1.0, w=W1, h=0.3)
    with pytest.raises(TypeError):
        blockwise_ppp(RegressionSample(y=np.ones(4), n=4),
                      beta=1.0, R=1.0, w=W1, h=0.5)


def test_blockwise_ppp_extends_short_band():
    # band of height 0.3 cannot contain a threshold at the block minimum
    # plus 1; the estimator must widen the band, not silently truncate
    rng = np.random.default_rng(5)
    s = sample_ppp(boundary("const:0"), n=50, band_height=0.3, rng=rng)
    rep = blockwise_ppp(s, beta=1.0, R=1.0, w=W1, h=1.0)
    assert s.band_height > 0.3
    assert np.isfinite(rep.theta_hat)
    # every point below the threshold is now materialized
    assert s.band_floor(0.0, 1.0) >= s.y.min() + 1.0


# ----------------------------------------------------------------------
# blockwise, regression model


def test_blockwise_regression_hand_values():
    s = RegressionSample(y=np.array([0.3, 0.9, 0.4, 0.2]), n=4)
    noise = noise_exponential(2.0)
    rep = blockwise_regression(s, noise, W1, h=0.5, beta=1.0, R=2.0)
    assert rep.theta_hat == pytest.approx(-0.05, abs=1e-14)
    assert list(rep.block_counts) == [2, 2]
    ada = blockwise_regression(s, noise, W1, h=0.5, intercept="adaptive")
    assert ada.theta_hat == pytest.approx(0.05, abs=1e-14)
    assert list(ada.block_counts) == [1, 2]
    assert list(ada.block_minima) == [0.3, 0.2]


def test_blockwise_regression_validation():
    s = RegressionSample(y=np.ones(10), n=10)
    noise = noise_exponential(1.0)
    with pytest.raises(ValueError):
        blockwise_regression(s, noise, W1, h=0.15, beta=1.0, R=1.0)
    with pytest.raises(ValueError):
        blockwise_regression(s, noise, W1, h=0.3, beta=1.0, R=1.0)
    with pytest.raises(ValueError):
        blockwise_regression(s, noise, W1, h=0.5, intercept="class")
    with pytest.raises(ValueError):
        blockwise_regression(s, noise, W1, h=0.5, intercept="median")
    with pytest.raises(TypeError):
        blockwise_regression(_points([0.5], [0.1], 1), noise, W1, h=1.0,
                             intercept="adaptive")


# ----------------------------------------------------------------------
# maximum likelihood


def test_mle_hoelder_ppp_hand_value():
    s = _points([0.25, 0.75], [0.5, 0.5], n=5)
    rep = mle_hoelder(s, beta=1.0, R=2.0, w=W1)
    # envelope integral 0.75, both sites on the graph: 0.75 - 2/5
    assert rep.theta_hat == pytest.approx(0.35, abs=1e-13)
    assert sorted(rep.on_graph) == [0, 1]
    assert rep.sigma_sq == pytest.approx(0.08, abs=1e-14)
    assert rep.sigma_hat == pytest.approx(math.sqrt(0.08), abs=1e-14)


def test_mle_hoelder_regression_hand_value():
    s = RegressionSample(y=np.array([0.5, 0.2, 0.6, 0.3]), n=4)
    rep = mle_hoelder(s, beta=1.0, R=1.0, w=W1, lam=1.0)
    # fitted heights 0.45, 0.2, 0.45, 0.3; the two local minima are on
    # the graph and each contributes a unit debias
    assert rep.theta_hat == pytest.approx(-0.15, abs=1e-14)
    assert sorted(rep.on_graph) == [1, 3]
    assert rep.sigma_sq == pytest.approx(0.125, abs=1e-14)


def test_mle_hoelder_regression_needs_lam():
    s = RegressionSample(y=np.ones(3), n=3)
    with pytest.raises(ValueError):
        mle_hoelder(s, beta=1.0, R=1.0, w=W1)


def test_mle_hoelder_empty_sample():
    s = PointSample(x=np.empty(0), y=np.empty(0), n=5)
    with pytest.raises(EstimationFailure):
        mle_hoelder(s, beta=1.0, R=1.0, w=W1)
    with pytest.raises(TypeError):
        mle_hoelder(object(), beta=1.0, R=1.0, w=W1)


def test_mle_shift_equivariance():
    # adding a constant to all heights shifts the estimate by that
    # constant times the weight's mass, exactly
    rng = np.random.default_rng(11)
    x, y = rng.random(30), rng.random(30)
    w = weight("const:2@0.1,0.9")
    base = mle_hoelder(_points(x, y, 30), beta=1.0, R=1.0, w=w)
    lift = mle_hoelder(_points(x, y + 0.7, 30), beta=1.0, R=1.0, w=w)
    assert lift.theta_hat - base.theta_hat == pytest.approx(
        0.7 * w.integral(0.0, 1.0), abs=1e-12)
    assert sorted(lift.on_graph) == sorted(base.on_graph)


def test_mle_hoelder_short_band_is_extended():
    rng = np.random.default_rng(29)
    s = sample_ppp(boundary("const:0"), n=30, band_height=0.2, rng=rng)
    rep = mle_hoelder(s, beta=1.0, R=1.0, w=W1)
    # the envelope rises well above a band of 0.2 between points, so
    # exactness requires an extension
    assert s.band_height > 0.2
    env = rep.envelope
    grid = np.linspace(0, 1, 201)
    assert float(np.max(env(grid))) <= s.band_floor(0.0, 1.0) + 1e-9


def test_mle_monotone_ppp_hand_value():
    s = _points([0.3, 0.5, 0.7], [0.2, 0.9, 0.4], n=10)
    w = weight("const:1@0,0.7")
    rep = mle_monotone(s, w)
    # step integral 0.22 minus 2/10 for the two on-graph sites
    assert rep.theta_hat == pytest.approx(0.02, abs=1e-14)
    assert sorted(rep.on_graph) == [0, 2]
    assert rep.sigma_sq == pytest.approx(0.02, abs=1e-15)


def test_mle_monotone_ppp_unsupported_weight():
    s = _points([0.3, 0.5, 0.7], [0.2, 0.9, 0.4], n=10)
    with pytest.raises(EstimationFailure):
        mle_monotone(s, W1)     # support reaches 1 > last abscissa


def test_mle_monotone_regression_hand_value():
    s = RegressionSample(y=np.array([0.5, 0.3, 0.3, 0.4]), n=4)
    rep = mle_monotone(s, W1, lam=1.0)
    # suffix minima 0.3 0.3 0.3 0.4; all but the first observation are
    # on the graph, so the sum is 0.3 - 0.7 - 0.7 - 0.6
    assert rep.theta_hat == pytest.approx(-0.425, abs=1e-14)
    assert sorted(rep.on_graph) == [1, 2, 3]


# ----------------------------------------------------------------------
# penalty, critical values, bandwidth selection


def test_penalty_transform_values():
    got = penalty_transform(1.0, 0.1)
    assert got == pytest.approx(np.log(0.8) / (-2.0) - 0.1, abs=1e-16)
    assert got == pytest.approx(0.011571775657104877, abs=1e-15)
    assert penalty_transform(2.0, 0.0) == 0.0
    assert penalty_transform(0.0, 0.3) == 0.0
    # even in y, increasing in |y|
    ys = np.linspace(-0.4, 0.4, 17)
    vals = penalty_transform(1.0, ys)
    assert np.all(vals >= 0)
    assert np.allclose(vals, vals[::-1], atol=1e-16)
    assert np.all(np.diff(vals[8:]) > 0)


def test_penalty_transform_domain():
    with pytest.raises(ValueError):
        penalty_transform(1.0, 0.5)
    with pytest.raises(ValueError):
        penalty_transform(1.0, 0.6)
    with pytest.raises(ValueError):
        penalty_transform(-1.0, 0.1)


def _kappa_by_hand(y, n, lam, C, w_vals, h, c):
    m = round(n * h)
    x = math.sqrt(c * math.log(n))
    total = 0.0
    for k in range(n // m):
        thr = min(y[k * m:(k + 1) * m]) + 1.0 / (n * h)
        for i in range(k * m, (k + 1) * m):
            if y[i] <= thr:
                z = abs(math.sqrt(h) * w_vals[i])
                total += (math.log(1 - 2 * x * z) / (-2 * x) - z) \
                    / (n * lam * math.sqrt(h))
    total += (C * c * math.log(n)) ** 2 \
        * (sum(abs(v) for v in w_vals) / n) / ((n * h) ** 2 * lam)
    total += x / (2 * n * lam * math.sqrt(h))
    return total


@pytest.mark.parametrize("noise", [noise_exponential(1.3), noise_uniform01()])
def test_critical_value_against_reimplementation(noise):
    rng = np.random.default_rng(37)
    n = 24
    s = RegressionSample(y=rng.exponential(1.0, n) + 0.2, n=n)
    w = weight("cos-basis:1")
    for h in (0.25, 0.5):
        got = critical_value(s, noise, w, h, c=0.05)
        expect = _kappa_by_hand(list(s.y), n, noise.lam, noise.quad_const,
                                list(w(s.x)), h, 0.05)
        assert got == pytest.approx(expect, rel=1e-12)


def test_select_bandwidth_rule():
    # first pair violating the band wins ...
    assert _select_bandwidth([0.0, 10.0, 0.5], [1.0, 2.0, 3.0]) == 0
    # ... exact ties do not trigger ...
    assert _select_bandwidth([0.0, 4.0, 0.0], [1.0, 3.0, 1.0]) == 2
    # ... and an empty trigger set yields the largest bandwidth
    assert _select_bandwidth([1.0, 1.1, 1.05], [5.0, 5.0, 5.0]) == 2
    assert _select_bandwidth([3.0], [1.0]) == 0


def test_lepski_select_matches_reimplementation():
    rng = np.random.default_rng(101)
    n = 40
    s = RegressionSample(y=rng.exponential(0.5, n) + 0.3, n=n)
    noise = noise_exponential(2.0)
    cfg = LepskiConfig(bandwidths=(0.25, 0.5), c=0.1)
    rep = lepski_select(s, noise, W1, cfg)

    # independent pass over the definition
    ests, kaps = [], []
    for h in cfg.bandwidths:
        m = round(n * h)
        tot = 0.0
        for k in range(n // m):
            block = s.y[k * m:(k + 1) * m]
            thr = block.min() + 1.0 / (n * h)
            for v in block:
                tot += min(v, thr) - (v <= thr) / noise.lam
        ests.append(tot / n)
        kaps.append(_kappa_by_hand(list(s.y), n, noise.lam, 0.0,
                                   [1.0] * n, h, cfg.c))
    chosen = len(ests) - 1
    for m in range(len(ests) - 1):
        if any(abs(ests[mp] - ests[m + 1]) > kaps[m + 1] + kaps[mp]
               for mp in range(m + 1)):
            chosen = m
            break
    assert rep.chosen_index == chosen
    assert rep.chosen_h == cfg.bandwidths[chosen]
    assert rep.theta_hat == pytest.approx(ests[chosen], rel=1e-12)
    np.testing.assert_allclose(rep.kappas, kaps, rtol=1e-12)
    assert rep.on_graph_count == rep.block.on_graph_count


def test_lepski_single_bandwidth():
    rng = np.random.default_rng(3)
    s = RegressionSample(y=rng.exponential(1.0, 20), n=20)
    rep = lepski_select(s, noise_exponential(1.0), W1,
                        LepskiConfig(bandwidths=(0.5,), c=0.05))
    assert rep.chosen_h == 0.5
    direct = blockwise_regression(s, noise_exponential(1.0), W1, h=0.5,
                                  intercept="adaptive")
    assert rep.theta_hat == direct.theta_hat


def test_lepski_rejects_oversized_constant():
    rng = np.random.default_rng(3)
    s = RegressionSample(y=rng.exponential(1.0, 40), n=40)
    cfg = LepskiConfig(bandwidths=(0.25, 0.5), c=5.5)
    with pytest.raises(ValueError, match="tuning constant|out of range"):
        lepski_select(s, noise_exponential(1.0), W1, cfg)
    with pytest.raises(ValueError):
        lepski_select(s, noise_exponential(1.0), W1,
                      LepskiConfig(bandwidths=(0.5, 0.25), c=0.05))


# ----------------------------------------------------------------------
# bandwidth oracle


def test_oracle_bandwidth_values():
    assert oracle_bandwidth(200, 1.0, 1.0) == pytest.approx(0.05)
    assert oracle_bandwidth(200, 1.0, 1.0, regression=True) == pytest.approx(0.05)
    # (100)**(-2/3) ~ 0.0464: nearest whole block count is 22 ...
    assert oracle_bandwidth(100, 0.5, 1.0) == pytest.approx(1.0 / 22.0)
    # ... while the divisor constraint of n = 100 rounds to blocks of 5
    assert oracle_bandwidth(100, 0.5, 1.0, regression=True) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        oracle_bandwidth(100, 0.0, 1.0)
    with pytest.raises(ValueError):
        oracle_bandwidth(100, 1.0, -1.0)


# ----------------------------------------------------------------------
# series coefficients


def test_series_hand_values():
    s = _points([0.25, 0.75], [0.5, 0.5], n=5)
    rep = series_estimator(s, M=2, beta=1.0, R=2.0)
    assert rep.coefficients[0] == pytest.approx(0.35, abs=1e-13)
    # the envelope is symmetric about 1/2 and the on-graph abscissae
    # cancel in the odd mode
    assert abs(rep.coefficients[1]) < 1e-9
    assert rep(0.5) == pytest.approx(0.35, abs=1e-9)
    assert rep.on_graph_count == 2


def test_series_matches_per_weight_mle():
    rng = np.random.default_rng(47)
    s = _points(rng.random(25), rng.random(25), n=25)
    rep = series_estimator(s, M=3, beta=1.0, R=1.5)
    for m in range(3):
        one = mle_hoelder(s, beta=1.0, R=1.5, w=weight(f"cos-basis:{m}"))
        assert rep.coefficients[m] == pytest.approx(one.theta_hat, abs=1e-12)

    reg = RegressionSample(y=rng.exponential(0.3, 12) + 0.5, n=12)
    rep = series_estimator(reg, M=2, beta=1.0, R=1.0, lam=1.0)
    for m in range(2):
        one = mle_hoelder(reg, beta=1.0, R=1.0,
                          w=weight(f"cos-basis:{m}"), lam=1.0)
        assert rep.coefficients[m] == pytest.approx(one.theta_hat, abs=1e-12)


def test_series_validation():
    with pytest.raises(ValueError):
        series_estimator(_points([0.5], [0.1], 1), M=0, beta=1.0, R=1.0)
    with pytest.raises(ValueError):
        series_estimator(RegressionSample(y=np.ones(4), n=4),
                         M=1, beta=1.0, R=1.0)
