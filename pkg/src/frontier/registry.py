"""Small string registry for declarative experiment configs.

Identifiers
-----------
boundary:  ``const:c``            constant c
           ``sqrt``               square root, smoothness (beta, R) = (1/2, 1)
           ``sin4x``              0.5*sin(2*pi*x) + 4*x, Lipschitz (R = 8)
weight:    ``const:c``            constant c
           ``cos-basis:m``        m = 0 gives 1; m >= 1 gives sqrt(2)*cos(pi*m*x)
           any weight id may carry a support suffix ``@a,b``
noise:     ``exp:lam`` (or ``exp``), ``uniform``
"""

from __future__ import annotations

import math

import numpy as np

from .model import (BoundaryFunction, NoiseModel, WeightFunction,
                    noise_exponential, noise_uniform01)

__all__ = ["boundary", "weight", "noise", "cosine_weight"]

# Any Lipschitz constant >= 4 + pi is valid for sin4x; 8 is the documented
# default used throughout the experiments.
SIN4X_R = 8.0


def boundary(spec: str) -> BoundaryFunction:
    """Resolve a boundary identifier to a BoundaryFunction."""
    if spec.startswith("const:"):
        c = float(spec.split(":", 1)[1])
        return BoundaryFunction(
            fn=lambda x, c=c: np.full_like(np.asarray(x, dtype=float), c),
            g_min=c, g_max=c, beta=1.0, R=0.0, monotone=True,
            derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            antiderivative=lambda x, c=c: c * x,
            label=spec,
        )
    if spec == "sqrt":
        return BoundaryFunction(
            fn=np.sqrt, g_min=0.0, g_max=1.0, beta=0.5, R=1.0, monotone=True,
            antiderivative=lambda x: (2.0 / 3.0) * x ** 1.5,
            label=spec,
        )
    if spec == "sin4x":
        two_pi = 2.0 * math.pi
        return BoundaryFunction(
            fn=lambda x: 0.5 * np.sin(two_pi * x) + 4.0 * x,
            g_min=0.0, g_max=4.0, beta=1.0, R=SIN4X_R, monotone=True,
            derivative=lambda x: math.pi * np.cos(two_pi * x) + 4.0,
            antiderivative=lambda x: -np.cos(two_pi * x) / (2.0 * two_pi)
            + 2.0 * x ** 2 + 1.0 / (2.0 * two_pi),
            label=spec,
        )
    raise ValueError(f"unknown boundary id {spec!r}")


def cosine_weight(m: int, support: tuple[float, float] = (0.0, 1.0)) -> WeightFunction:
    """Orthonormal cosine basis function number ``m`` (0-indexed)."""
    if m < 0:
        raise ValueError(f"basis index must be nonnegative, got {m}")
    if m == 0:
        return WeightFunction(
            fn=lambda x: np.ones_like(np.asarray(x, dtype=float)),
            support=support, sup_bound=1.0,
            antiderivative=lambda x: x, const_value=1.0,
            label=f"cos-basis:{m}",
        )
    freq = math.pi * m
    root2 = math.sqrt(2.0)
    return WeightFunction(
        fn=lambda x: root2 * np.cos(freq * np.asarray(x, dtype=float)),
        support=support, sup_bound=root2,
        antiderivative=lambda x: root2 * np.sin(freq * x) / freq,
        label=f"cos-basis:{m}",
    )


def weight(spec: str) -> WeightFunction:
    """Resolve a weight identifier, honoring an optional ``@a,b`` suffix."""
    support = (0.0, 1.0)
    if "@" in spec:
        spec, _, tail = spec.partition("@")
        a, b = (float(t) for t in tail.split(","))
        if not 0.0 <= a < b <= 1.0:
            raise ValueError(f"invalid weight support [{a}, {b}]")
        support = (a, b)
    if spec.startswith("const:"):
        c = float(spec.split(":", 1)[1])
        return WeightFunction(
            fn=lambda x, c=c: np.full_like(np.asarray(x, dtype=float), c),
            support=support, sup_bound=abs(c),
            antiderivative=lambda x, c=c: c * x, const_value=c,
            label=spec if support == (0.0, 1.0) else f"{spec}@{support[0]:g},{support[1]:g}",
        )
    if spec.startswith("cos-basis:"):
        return cosine_weight(int(spec.split(":", 1)[1]), support)
    raise ValueError(f"unknown weight id {spec!r}")


def noise(spec: str) -> NoiseModel:
    """Resolve a noise identifier to a NoiseModel."""
    if spec == "exp":
        return noise_exponential(1.0)
    if spec.startswith("exp:"):
        return noise_exponential(float(spec.split(":", 1)[1]))
    if spec == "uniform":
        return noise_uniform01()
    raise ValueError(f"unknown noise id {spec!r}")
