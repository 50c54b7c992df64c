"""Sampling, lower-envelope geometry, and unbiased functional estimation
for one-sided boundary models, with a seeded Monte Carlo harness."""

from .envelope import (build_cone_envelope, build_step_envelope,
                       envelope_deviation_survival, integrate_envelope,
                       on_graph_sites)
from .estimators import (EstimateReport, EstimationFailure, LepskiConfig,
                         blockwise_ppp, blockwise_regression,
                         default_tuning_constant, lepski_select, mle_hoelder,
                         mle_monotone, oracle_bandwidth, series_estimator)
from .harness import (CoverageReport, ExperimentSpec, MCResult, MCRow,
                      coverage_study, emit_csv, emit_json, fit_loglog,
                      fit_rate, load_json, replicate_rng, run_mc,
                      target_functional)
from .inference import (asymptotic_variance, kolmogorov_survival,
                        mle_deviation_law_test, normal_quantile,
                        self_normalized_ci)
from .model import (BoundaryFunction, NoiseModel, PointSample,
                    RegressionSample, WeightFunction, default_band_height,
                    extend_ppp, noise_exponential, noise_uniform01,
                    sample_ppp, sample_regression)
from .registry import boundary, cosine_weight, noise, weight

__version__ = "0.1.0"

__all__ = [
    # model building blocks
    "BoundaryFunction",
    "WeightFunction",
    "NoiseModel",
    "PointSample",
    "RegressionSample",
    "sample_ppp",
    "extend_ppp",
    "sample_regression",
    "noise_exponential",
    "noise_uniform01",
    "default_band_height",
    # registry identifiers
    "boundary",
    "weight",
    "cosine_weight",
    "noise",
    # envelopes
    "build_cone_envelope",
    "build_step_envelope",
    "integrate_envelope",
    "on_graph_sites",
    "envelope_deviation_survival",
    # estimators
    "EstimationFailure",
    "EstimateReport",
    "LepskiConfig",
    "blockwise_ppp",
    "blockwise_regression",
    "mle_hoelder",
    "mle_monotone",
    "series_estimator",
    "lepski_select",
    "oracle_bandwidth",
    "default_tuning_constant",
    # inference
    "self_normalized_ci",
    "normal_quantile",
    "asymptotic_variance",
    "kolmogorov_survival",
    "mle_deviation_law_test",
    # harness
    "ExperimentSpec",
    "MCRow",
    "MCResult",
    "CoverageReport",
    "run_mc",
    "coverage_study",
    "fit_rate",
    "fit_loglog",
    "target_functional",
    "replicate_rng",
    "emit_csv",
    "emit_json",
    "load_json",
    "__version__",
]
