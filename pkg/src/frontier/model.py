"""Observation models for one-sided boundary data.

Both models share an unknown lower boundary ``g`` on the unit interval.
In the point-process model the data are the points of a Poisson process
on ``[0,1] x R`` whose intensity is ``n`` above the graph of ``g`` and
zero below it.  In the regression model the data are ``y_i = g(i/n) +
eps_i`` for ``i = 1..n`` with nonnegative noise whose distribution
function has derivative ``lam`` at the origin.

Point-process realizations are materialized on a band of height ``T``
above the graph.  Estimators only ever consult observations up to a
data-dependent threshold; whenever a threshold could exceed the band,
the band is enlarged by superposing an independent realization on the
missing strip, which reproduces the law of the taller band exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

__all__ = [
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
]

#: Survival probabilities of noise laws with bounded support are clipped
#: here so that log-survival terms stay finite.  Estimator thresholds at
#: sensible bandwidths never reach the clipped region.
SURVIVAL_FLOOR = 1e-300


@dataclass(frozen=True)
class BoundaryFunction:
    """A known boundary curve on [0, 1] with its shape-class metadata.

    Parameters
    ----------
    fn : callable
        Vectorized evaluation map; exact closed form.
    g_min, g_max : float
        Finite bounds with ``g_min <= fn(x) <= g_max`` on [0, 1].
    beta, R : float, optional
        Smoothness class: ``|fn(x) - fn(y)| <= R |x - y|**beta``.
        ``None`` when no such bound is claimed.
    monotone : bool
        True when ``fn`` is nondecreasing.
    derivative : callable, optional
        Weak derivative, supplied in closed form when available.
    antiderivative : callable, optional
        Exact antiderivative of ``fn``, used for fast integration.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    g_min: float
    g_max: float
    beta: float | None = None
    R: float | None = None
    monotone: bool = False
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    antiderivative: Callable[[float], float] | None = None
    label: str = ""

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    @property
    def hoelder(self) -> bool:
        return self.beta is not None

    def floor_on(self, a: float, b: float) -> float:
        """A lower bound for ``min fn`` over ``[a, b]``.

        Exact for monotone boundaries; for smoothness-class boundaries a
        grid minimum minus the class modulus of half the grid spacing;
        otherwise the global lower bound.
        """
        if b < a:
            a, b = b, a
        if self.monotone:
            return float(self(a))
        if self.hoelder and self.R is not None:
            grid = np.linspace(a, b, 33)
            spacing = (b - a) / 32
            return float(self(grid).min() - self.R * (spacing / 2) ** self.beta)
        return self.g_min


@dataclass(frozen=True)
class WeightFunction:
    """Weight for linear functionals ``integral of g * w`` and their sums.

    ``fn`` is forced to zero outside ``support``.  When ``antiderivative``
    (of the unrestricted ``fn``, from 0) or ``const_value`` is given,
    interval integrals are computed exactly instead of by quadrature.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float] = (0.0, 1.0)
    sup_bound: float = 1.0
    antiderivative: Callable[[float], float] | None = None
    const_value: float | None = None
    label: str = ""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        vals = np.asarray(self.fn(x), dtype=float)
        a, b = self.support
        if a > 0.0 or b < 1.0:
            vals = np.where((x >= a) & (x <= b), vals, 0.0)
        return vals

    def integral(self, a: float, b: float, tol: float = 1e-9) -> float:
        """Integral of the (support-restricted) weight over ``[a, b]``."""
        lo, hi = self.support
        a, b = max(a, lo), min(b, hi)
        if b <= a:
            return 0.0
        if self.antiderivative is not None:
            return float(self.antiderivative(b) - self.antiderivative(a))
        if self.const_value is not None:
            return self.const_value * (b - a)
        val, _ = quad(self.fn, a, b, epsabs=tol, limit=200)
        return float(val)


@dataclass(frozen=True)
class NoiseModel:
    """One-sided noise law for the regression model.

    ``survival(z) = P(eps > z)`` for ``z >= 0``; ``g_eps(z) = lam*z +
    log(survival(z))`` is supplied in closed form so that exact
    cancellations (for the exponential law it vanishes identically) are
    not lost to rounding.  ``quad_const`` is a constant ``C >= 0`` with
    ``|g_eps(z)| <= C**2 z**2`` on ``[0, delta]``.
    """

    lam: float
    survival: Callable[[np.ndarray], np.ndarray]
    g_eps: Callable[[np.ndarray], np.ndarray]
    quad_const: float
    delta: float
    tail_exponent: float
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    label: str = ""


def noise_exponential(lam: float) -> NoiseModel:
    """Exponential noise with rate ``lam``; the canonical one-sided law."""
    if not lam > 0:
        raise ValueError(f"noise rate must be positive, got lam={lam}")
    return NoiseModel(
        lam=lam,
        survival=lambda z: np.exp(-lam * np.asarray(z, dtype=float)),
        g_eps=lambda z: np.zeros_like(np.asarray(z, dtype=float)),
        quad_const=0.0,
        delta=np.inf,
        tail_exponent=1.0,
        sampler=lambda rng, size: rng.exponential(1.0 / lam, size),
        label=f"exp:{lam:g}",
    )


def noise_uniform01() -> NoiseModel:
    """Uniform noise on [0, 1]; unit density at the origin."""

    def survival(z):
        return np.maximum(1.0 - np.asarray(z, dtype=float), SURVIVAL_FLOOR)

    def g_eps(z):
        z = np.asarray(z, dtype=float)
        return z + np.log(survival(z))

    return NoiseModel(
        lam=1.0,
        survival=survival,
        g_eps=g_eps,
        quad_const=1.0,
        delta=0.5,
        tail_exponent=1.0,
        sampler=lambda rng, size: rng.random(size),
        label="uniform",
    )


@dataclass
class PointSample:
    """Points of the boundary process, sorted by the first coordinate.

    ``band_height`` is the height ``T`` of the materialized band above the
    graph: every point of the underlying process with ``y <= g(x) + T``
    is present.  ``band_height = inf`` marks a fully materialized sample
    (hand-built fixtures).  ``boundary`` and ``rng`` are retained so the
    band can be extended on demand.
    """

    x: np.ndarray
    y: np.ndarray
    n: float
    band_height: float = np.inf
    boundary: BoundaryFunction | None = None
    rng: np.random.Generator | None = field(default=None, repr=False)
    provenance: str | None = None

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        if x.shape != y.shape:
            raise ValueError("x and y must have equal length")
        order = np.argsort(x, kind="stable")
        self.x = x[order]
        self.y = y[order]

    def __len__(self) -> int:
        return self.x.size

    @property
    def ceiling(self) -> float:
        """Conservative global bound on materialized heights."""
        if self.boundary is None:
            return np.inf
        return self.boundary.g_max + self.band_height

    def band_floor(self, a: float, b: float) -> float:
        """Guaranteed materialized height over ``[a, b]``: thresholds up
        to this value see every point of the underlying process."""
        if not np.isfinite(self.band_height):
            return np.inf
        if self.boundary is None:
            raise ValueError("finite band without a boundary function")
        return self.boundary.floor_on(a, b) + self.band_height

    def ensure_band(self, threshold: float, a: float, b: float) -> None:
        """Extend the band so that ``threshold`` is covered on ``[a, b]``."""
        deficit = threshold - self.band_floor(a, b)
        if deficit > 0:
            extend_ppp(self, extra_height=deficit + 1.0)


@dataclass
class RegressionSample:
    """Fixed-design observations ``y[i-1] = g(i/n) + eps_i``, i = 1..n."""

    y: np.ndarray
    n: int
    provenance: str | None = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        if self.y.shape != (self.n,):
            raise ValueError(f"expected {self.n} observations, got {self.y.shape}")

    @property
    def x(self) -> np.ndarray:
        return np.arange(1, self.n + 1) / self.n

    def __len__(self) -> int:
        return self.n


def default_band_height(n: float, R: float, beta: float = 1.0,
                        h_min: float | None = None) -> float:
    """Band height covering every blockwise threshold with large margin.

    Thresholds are at most a block minimum plus ``R * h**beta``; the block
    minimum exceeds the local boundary level by more than ``20/(n*h)``
    with probability below ``exp(-20)``.
    """
    slack = 20.0 / (n * h_min) if h_min is not None else 0.0
    return R * 1.0 ** beta + slack + 1.0


def sample_ppp(g: BoundaryFunction, n: float, band_height: float,
               rng: np.random.Generator, provenance: str | None = None) -> PointSample:
    """Draw the boundary point process on the band of height ``band_height``.

    The intensity above the graph is a vertical translate of a product
    measure, so the construction is exact: draw a Poisson(n*T) number of
    points uniform on ``[0,1] x [0,T]`` and shift each by ``g(x)``.
    """
    if not band_height > 0:
        raise ValueError(f"band height must be positive, got {band_height}")
    if not n > 0:
        raise ValueError(f"intensity scale must be positive, got n={n}")
    count = rng.poisson(n * band_height)
    u = rng.random(count)
    v = band_height * rng.random(count)
    return PointSample(x=u, y=g(u) + v, n=n, band_height=band_height,
                       boundary=g, rng=rng, provenance=provenance)


def extend_ppp(sample: PointSample, g: BoundaryFunction | None = None,
               extra_height: float = 1.0,
               rng: np.random.Generator | None = None) -> PointSample:
    """Raise the materialized band by ``extra_height`` in place.

    Superposes an independent realization on the strip
    ``[g(x) + T, g(x) + T + extra_height]``; the union has the law of the
    process on the taller band.  Returns the (mutated) sample.
    """
    if not extra_height > 0:
        raise ValueError(f"extra height must be positive, got {extra_height}")
    g = g if g is not None else sample.boundary
    rng = rng if rng is not None else sample.rng
    if g is None or rng is None:
        raise ValueError("band extension needs a boundary function and an RNG")
    if not np.isfinite(sample.band_height):
        raise ValueError("cannot extend a fully materialized sample")
    count = rng.poisson(sample.n * extra_height)
    u = rng.random(count)
    v = extra_height * rng.random(count)
    x = np.concatenate([sample.x, u])
    y = np.concatenate([sample.y, g(u) + sample.band_height + v])
    order = np.argsort(x, kind="stable")
    sample.x = x[order]
    sample.y = y[order]
    sample.band_height += extra_height
    return sample


def sample_regression(g: BoundaryFunction, n: int, noise: NoiseModel,
                      rng: np.random.Generator,
                      provenance: str | None = None) -> RegressionSample:
    """Draw ``y_i = g(i/n) + eps_i`` at design points ``i/n``, i = 1..n."""
    if n < 1:
        raise ValueError(f"design size must be at least 1, got n={n}")
    x = np.arange(1, n + 1) / n
    eps = np.asarray(noise.sampler(rng, n), dtype=float)
    return RegressionSample(y=g(x) + eps, n=n, provenance=provenance)
