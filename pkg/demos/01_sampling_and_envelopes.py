"""
Sampling a boundary point process and reading off its lower envelope
====================================================================

Walks through the two data-generating mechanisms (planar Poisson points
above a curve, and fixed-design one-sided regression), then builds the
step and cone envelopes that every estimator in the package works from.
"""

import numpy as np

from frontier import (boundary, weight, noise, sample_ppp, sample_regression,
                      extend_ppp, build_step_envelope, build_cone_envelope,
                      integrate_envelope, on_graph_sites, default_band_height,
                      target_functional)

rng = np.random.default_rng(42)

# --- Poisson sample above the square-root boundary ----------------------
# Points fall uniformly in the region between the curve and the top of a
# band; the band must be tall enough that no estimator ever reaches its
# ceiling.  default_band_height picks a safe height from (n, smoothness).
g = boundary("sqrt")
n = 400.0
band = default_band_height(n, R=g.R, beta=g.beta)
sample = sample_ppp(g, n=n, band_height=band, rng=rng)
print(f"poisson sample: {sample.x.size} points, band height {band:.3f}")
print(f"  lowest point sits {np.min(sample.y - g(sample.x)):.2e} above the curve")

# --- The step envelope --------------------------------------------------
# Running minimum from the right: at x it is the smallest observation at
# or to the right of x.  Piecewise constant, left-continuous, and always
# sitting weakly above the true curve.  To the right of the last sample
# point there is nothing to take a minimum over, so integrals against it
# need a weight whose support stops short of 1.
step = build_step_envelope(sample.x, sample.y)
w = weight("const:1@0,0.9")
theta_step = integrate_envelope(step, w)
theta_true = target_functional(g, w, model="ppp")
print(f"step-envelope integral : {theta_step:.5f}  (target {theta_true:.5f})")

# The observations that actually touch the envelope; everything else in
# the sample lies strictly above it and carries no information about g.
touching = on_graph_sites(step)
print(f"  {touching.size} of {sample.x.size} points lie on the envelope graph")

# --- The cone envelope --------------------------------------------------
# When a smoothness class (exponent beta, constant R) is known we can do
# better: fit the largest function below all points whose increments obey
# the class.  The result hugs the data much more tightly than a flat step.
cone = build_cone_envelope(sample.x, sample.y, beta=g.beta, R=g.R)
theta_cone = integrate_envelope(cone, w)
print(f"cone-envelope integral : {theta_cone:.5f}  (target {theta_true:.5f})")

# --- Growing the band after the fact ------------------------------------
# A sample drawn on a short band can be extended upward in place.  The
# superposition has exactly the law of a single draw on the taller band,
# so code that needs more headroom never has to resample from scratch.
before = sample.x.size
extend_ppp(sample, g=g, extra_height=0.5, rng=rng)
print(f"extended band by 0.5: {before} -> {sample.x.size} points")

# --- Regression sample --------------------------------------------------
# Same boundary, but now one observation per design point i/n with a
# positive error on top.  The envelope machinery is shared between models.
reg = sample_regression(boundary("sin4x"), n=300, noise=noise("exp:1"), rng=rng)
reg_step = build_step_envelope(reg.x, reg.y)
print(f"regression sample: {reg.x.size} design points, "
      f"envelope touches {on_graph_sites(reg_step).size} of them")
