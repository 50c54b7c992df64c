"""Lower envelopes of planar point sets and their weighted integrals.

Cone envelopes.  Given sites ``(x_j, y_j)`` and class parameters
``(beta, R)``, the cone envelope is ``min_j (y_j + R |x - x_j|**beta)``:
the largest function in the smoothness class lying below every site.  It
is piecewise a single one-sided branch, and the construction reduces to
locating branch crossings.

* ``beta = 1``: branches are lines with slopes ``+-R``.  Writing
  ``a_j = y_j - R x_j`` and ``b_j = y_j + R x_j``, the envelope between
  two consecutive sites is the minimum of one rising line (prefix
  minimum of ``a``) and one falling line (suffix minimum of ``b``),
  which cross at ``(b - a) / (2R)``.  Everything is exact and O(N).

* ``beta < 1``: the difference of two same-side branches is strictly
  monotone in ``x``, so two branches cross at most once.  A left-to-right
  sweep maintains the future pieces of the one-sided envelope; each
  inserted site overtakes a prefix of them and the single crossing with
  the first surviving piece is found by bisection.  The two one-sided
  envelopes (one rising, one falling) are then intersected cell by cell,
  again with at most one crossing per cell.

Step envelopes.  For the monotone class the envelope is the suffix
minimum ``x -> min_{x_i >= x} y_i``, finite on ``[0, max x_i]`` and
infinite beyond.

On-graph detection never compares envelope values for floating equality:
a site is on the graph iff its height is at most the minimum of all
*competing* branches at its abscissa, and those one-sided competitor
minima are computed exactly (``beta = 1``) or recorded during the sweeps
(``beta < 1``).  Ties count as on-graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .model import BoundaryFunction, WeightFunction

__all__ = [
    "ConeEnvelope",
    "StepEnvelope",
    "build_cone_envelope",
    "build_step_envelope",
    "integrate_envelope",
    "on_graph_sites",
    "envelope_deviation_survival",
]

#: Bisection tolerance (in x) for branch crossings without closed form.
CROSSING_XTOL = 1e-10


# ----------------------------------------------------------------------
# cone envelopes


@dataclass
class ConeEnvelope:
    """Piecewise representation of a cone envelope on [0, 1].

    ``bounds``/``owners`` describe the active pieces: on
    ``[bounds[p], bounds[p+1]]`` the pointwise minimum is attained by the
    branch of site ``owners[p]`` (indices refer to the site order given
    at construction).  ``min_left[j]`` / ``min_right[j]`` hold the
    minimum over branches of sites strictly left / right of site ``j``
    (in sorted order, same-abscissa sites split by position), evaluated
    at ``x_j``; ``inf`` when no such site exists.
    """

    site_x: np.ndarray
    site_y: np.ndarray
    beta: float
    R: float
    bounds: np.ndarray
    owners: np.ndarray
    min_left: np.ndarray = field(repr=False)
    min_right: np.ndarray = field(repr=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.clip(np.searchsorted(self.bounds, x, side="right") - 1,
                    0, self.owners.size - 1)
        j = self.owners[k]
        return self.site_y[j] + self.R * np.abs(x - self.site_x[j]) ** self.beta


@dataclass
class StepEnvelope:
    """Suffix-minimum envelope: ``x -> min over sites with x_i >= x``.

    Finite and nondecreasing on ``[0, domain_end]``; ``inf`` beyond.
    """

    site_x: np.ndarray
    site_y: np.ndarray
    xs: np.ndarray = field(repr=False)       # sorted abscissae
    values: np.ndarray = field(repr=False)   # suffix minima aligned to xs
    domain_end: float = 0.0
    min_from: np.ndarray = field(default=None, repr=False)  # per original site

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.minimum(np.searchsorted(self.xs, x, side="left"),
                         self.xs.size - 1)
        out = self.values[idx]
        return np.where(x > self.domain_end, np.inf, out)


def _running_min_with_arg(v):
    """Inclusive running minimum of ``v`` and the index attaining it."""
    cm = np.minimum.accumulate(v)
    fresh = np.r_[True, v[1:] < cm[:-1]]
    arg = np.where(fresh, np.arange(v.size), 0)
    return cm, np.maximum.accumulate(arg)


def _compress(bounds, owners):
    """Drop zero-width pieces and merge consecutive pieces of one owner."""
    width = np.diff(bounds) > 1e-15
    starts, owners = bounds[:-1][width], owners[width]
    if owners.size == 0:
        return bounds[:1], owners
    keep = np.r_[True, owners[1:] != owners[:-1]]
    return np.append(starts[keep], bounds[-1]), owners[keep]


def _lipschitz_envelope(xs, ys, R):
    """Exact piece table for ``beta = 1`` plus one-sided competitor minima."""
    n = xs.size
    a = ys - R * xs                       # rising-branch intercepts
    b = ys + R * xs                       # falling-branch intercepts
    pref, pref_arg = _running_min_with_arg(a)
    suff_rev, suff_arg_rev = _running_min_with_arg(b[::-1])
    suff = suff_rev[::-1]
    suff_arg = (n - 1 - suff_arg_rev)[::-1]

    min_left = np.r_[np.inf, pref[:-1]] + R * xs
    min_right = np.r_[suff[1:], np.inf] - R * xs

    if n == 1:
        bounds = np.array([0.0, xs[0], 1.0])
        owners = np.array([0, 0])
        return _compress(bounds, owners) + (min_left, min_right)

    # between consecutive sites the envelope is min(rising, falling);
    # the crossing is clipped into the gap, leaving one or two pieces
    cross = (suff[1:] - pref[:-1]) / (2.0 * R)
    cross = np.clip(cross, xs[:-1], xs[1:])
    starts = np.empty(2 * (n - 1) + 2)
    ends = np.empty_like(starts)
    owners = np.empty(starts.size, dtype=np.intp)
    starts[0], ends[0], owners[0] = 0.0, xs[0], suff_arg[0]
    starts[1:-1:2], ends[1:-1:2], owners[1:-1:2] = xs[:-1], cross, pref_arg[:-1]
    starts[2:-1:2], ends[2:-1:2], owners[2:-1:2] = cross, xs[1:], suff_arg[1:]
    starts[-1], ends[-1], owners[-1] = xs[-1], 1.0, pref_arg[-1]
    bounds = np.append(starts, ends[-1])
    return _compress(bounds, owners) + (min_left, min_right)


def _half_envelope(xs, ys, beta, R, cap):
    """One-sided sweep: pieces of ``min over x_j <= x`` of the rising
    branches on ``[xs[0], cap]``, and the pre-insertion envelope value at
    every site (the strict-predecessor competitor minimum)."""
    n = xs.size
    at_site = np.full(n, np.inf)
    future = deque()               # [start, owner]; last piece runs to cap
    done_s, done_o = [], []

    def branch(j, x):
        return ys[j] + R * (x - xs[j]) ** beta

    for k in range(n):
        xk = xs[k]
        while len(future) >= 2 and future[1][0] <= xk:
            s, o = future.popleft()
            done_s.append(s)
            done_o.append(o)
        # competitor minimum at xk; probe neighbors of the containing
        # piece as well since ownership is only resolved to CROSSING_XTOL
        val = np.inf
        if future:
            val = branch(future[0][1], xk)
            if len(future) >= 2:
                val = min(val, branch(future[1][1], xk))
        if done_o:
            val = min(val, branch(done_o[-1], xk))
        at_site[k] = val
        if ys[k] >= val:
            continue
        if future and future[0][0] < xk:
            done_s.append(future[0][0])
            done_o.append(future[0][1])
            future[0][0] = xk
        cross = None
        while future:
            s_p, o_p = future[0]
            e_p = future[1][0] if len(future) > 1 else cap
            if branch(k, e_p) <= branch(o_p, e_p):
                future.popleft()
                continue
            if branch(k, s_p) >= branch(o_p, s_p):
                cross = s_p
            else:
                lo, hi = s_p, e_p     # branch(k) - branch(o_p) increases
                while hi - lo > CROSSING_XTOL:
                    mid = 0.5 * (lo + hi)
                    if branch(k, mid) <= branch(o_p, mid):
                        lo = mid
                    else:
                        hi = mid
                cross = 0.5 * (lo + hi)
                future[0][0] = cross
            break
        if cross is None:
            future = deque([[xk, k]])
        elif cross > xk:
            future.appendleft([xk, k])
    while future:
        s, o = future.popleft()
        done_s.append(s)
        done_o.append(o)
    return np.array(done_s), np.array(done_o, dtype=np.intp), at_site


def _concave_envelope(xs, ys, beta, R):
    """Piece table for ``beta < 1`` by intersecting the two one-sided
    envelopes cell by cell."""
    n = xs.size
    ls, lo_own, at_left = _half_envelope(xs, ys, beta, R, cap=1.0)
    rs_m, ro_m, at_right_m = _half_envelope(-xs[::-1], ys[::-1], beta, R, cap=0.0)
    # map the mirrored sweep back: piece [s', e'] in u = -x is [-e', -s']
    r_starts = -np.r_[rs_m[1:], 0.0][::-1]
    r_own = (n - 1 - ro_m)[::-1]
    min_right = at_right_m[::-1]
    min_left = at_left

    def left_branch(j, x):
        return ys[j] + R * (x - xs[j]) ** beta

    def right_branch(j, x):
        return ys[j] + R * (xs[j] - x) ** beta

    # xs[-1] must be a cell edge: the falling-branch envelope ends there
    edges = np.unique(np.concatenate([[0.0, 1.0, xs[-1]], ls, r_starts]))
    edges = edges[(edges >= 0.0) & (edges <= 1.0)]
    bounds = [0.0]
    owners = []

    def push(end, owner):
        if end > bounds[-1]:
            bounds.append(end)
            owners.append(owner)

    for l, u in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (l + u)
        a = lo_own[np.searchsorted(ls, mid, side="right") - 1] if mid > xs[0] else None
        b_idx = np.searchsorted(r_starts, mid, side="right") - 1
        b = r_own[b_idx] if mid < xs[-1] and b_idx >= 0 else None
        if a is None and b is None:       # only possible between equal
            push(u, 0)                    # abscissae; degenerate cell
            continue
        if b is None:
            push(u, a)
            continue
        if a is None:
            push(u, b)
            continue
        diff_l = left_branch(a, l) - right_branch(b, l)
        diff_u = left_branch(a, u) - right_branch(b, u)
        if diff_u <= 0:
            push(u, a)
        elif diff_l >= 0:
            push(u, b)
        else:
            lo, hi = l, u
            while hi - lo > CROSSING_XTOL:
                mid = 0.5 * (lo + hi)
                if left_branch(a, mid) - right_branch(b, mid) <= 0:
                    lo = mid
                else:
                    hi = mid
            push(0.5 * (lo + hi), a)
            push(u, b)
    return (*_compress(np.asarray(bounds), np.asarray(owners, dtype=np.intp)),
            min_left, min_right)


def build_cone_envelope(x, y, beta: float, R: float) -> ConeEnvelope:
    """Build the cone envelope of the sites ``(x, y)`` over [0, 1]."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.size == 0:
        raise ValueError("cone envelope needs at least one site")
    if x.shape != y.shape:
        raise ValueError("site coordinates must have equal length")
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"smoothness exponent must be in (0, 1], got {beta}")
    if not R > 0.0:
        raise ValueError(f"smoothness scale must be positive, got {R}")
    if x.min() < 0.0 or x.max() > 1.0:
        raise ValueError("site abscissae must lie in [0, 1]")

    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    if beta == 1.0:
        bounds, owners_s, ml_s, mr_s = _lipschitz_envelope(xs, ys, R)
    else:
        bounds, owners_s, ml_s, mr_s = _concave_envelope(xs, ys, beta, R)
    min_left = np.empty_like(ml_s)
    min_right = np.empty_like(mr_s)
    min_left[order] = ml_s
    min_right[order] = mr_s
    return ConeEnvelope(site_x=x, site_y=y, beta=beta, R=R,
                        bounds=bounds, owners=order[owners_s],
                        min_left=min_left, min_right=min_right)


def build_step_envelope(x, y) -> StepEnvelope:
    """Build the suffix-minimum envelope of the sites ``(x, y)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.size == 0:
        raise ValueError("step envelope needs at least one site")
    if x.shape != y.shape:
        raise ValueError("site coordinates must have equal length")
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    values = np.minimum.accumulate(ys[::-1])[::-1]
    # minimum over all sites with abscissa >= x_j, ties included
    group_start = np.searchsorted(xs, xs, side="left")
    min_from = np.empty_like(values)
    min_from[order] = values[group_start]
    return StepEnvelope(site_x=x, site_y=y, xs=xs, values=values,
                        domain_end=float(xs[-1]), min_from=min_from)


def on_graph_sites(env) -> np.ndarray:
    """Indices (into the construction order) of sites on the envelope.

    Exact inequality tests against competing branches; ties count as
    on-graph.  Invariant under permutation of the site list.
    """
    if isinstance(env, ConeEnvelope):
        rival = np.minimum(env.min_left, env.min_right)
        return np.flatnonzero(env.site_y <= rival)
    if isinstance(env, StepEnvelope):
        return np.flatnonzero(env.site_y <= env.min_from)
    raise TypeError(f"unsupported envelope type {type(env).__name__}")


# ----------------------------------------------------------------------
# integration

_GL_LO = np.polynomial.legendre.leggauss(10)
_GL_HI = np.polynomial.legendre.leggauss(20)


def _integrate_cells(f, lo, hi, tol):
    """Adaptive Gauss-Legendre over cells ``[lo_i, hi_i]``; the error
    budget ``tol`` is split proportionally to cell length.  ``f(x, idx)``
    evaluates the integrand on a node matrix whose rows belong to cells
    ``idx``."""
    keep = hi - lo > 1e-15
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        return 0.0
    total_len = np.sum(hi - lo)
    stack = [(lo, hi, np.flatnonzero(keep))]
    total = 0.0
    while stack:
        a, b, idx = stack.pop()
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        coarse = (f(mid[:, None] + half[:, None] * _GL_LO[0], idx)
                  * _GL_LO[1]).sum(axis=1) * half
        fine = (f(mid[:, None] + half[:, None] * _GL_HI[0], idx)
                * _GL_HI[1]).sum(axis=1) * half
        err = np.abs(fine - coarse)
        ok = (err <= tol * (b - a) / total_len) | (half <= 1e-14)
        total += fine[ok].sum()
        if not np.all(ok):
            a, b, idx = a[~ok], b[~ok], idx[~ok]
            m = 0.5 * (a + b)
            stack.append((a, m, idx))
            stack.append((m, b, idx))
    return float(total)


def _power_segment(l, u, x0, expo):
    """Vectorized ``integral of |x - x0|**(expo-1)`` over ``[l, u]``
    times ``1/expo`` handled by the caller via the antiderivative form:
    returns ``(|.|**expo`` contributions)/expo`` for each segment."""
    pos = np.maximum(u - x0, 0.0) ** expo + np.maximum(x0 - l, 0.0) ** expo
    neg = np.maximum(l - x0, 0.0) ** expo + np.maximum(x0 - u, 0.0) ** expo
    return (pos - neg) / expo


def integrate_envelope(env, w: WeightFunction, tol: float = 1e-9) -> float:
    """Integral of the envelope against ``w``.

    Cone envelopes integrate over [0, 1]; step envelopes over the support
    of ``w``, which must not extend past the envelope domain.  Constant
    weights use exact per-piece antiderivatives; otherwise adaptive
    quadrature keeps the total error within ``tol``.
    """
    a, b = w.support
    if isinstance(env, StepEnvelope):
        if b > env.domain_end + 1e-12:
            raise ValueError(
                f"weight support reaches {b:g}, beyond the envelope domain "
                f"ending at {env.domain_end:g}; the integral is infinite")
        prev = np.r_[0.0, env.xs[:-1]]
        lo = np.clip(prev, a, b)
        hi = np.clip(env.xs, a, b)
        if w.antiderivative is not None:
            seg = w.antiderivative(hi) - w.antiderivative(lo)
        elif w.const_value is not None:
            seg = w.const_value * (hi - lo)
        else:
            seg = np.array([quad(w.fn, l, u, epsabs=tol / max(env.xs.size, 1),
                                 limit=100)[0] if u > l else 0.0
                            for l, u in zip(lo, hi)])
        return float(np.dot(env.values, seg))

    if not isinstance(env, ConeEnvelope):
        raise TypeError(f"unsupported envelope type {type(env).__name__}")

    lo = np.clip(env.bounds[:-1], a, b)
    hi = np.clip(env.bounds[1:], a, b)
    ox = env.site_x[env.owners]
    oy = env.site_y[env.owners]
    if w.const_value is not None:
        base = oy * (hi - lo)
        curve = env.R * _power_segment(lo, hi, ox, env.beta + 1.0)
        return float(w.const_value * np.sum(base + curve))

    def integrand(x, idx):
        j = env.owners[idx]
        vals = env.site_y[j][:, None] + env.R * np.abs(
            x - env.site_x[j][:, None]) ** env.beta
        return vals * w(x)

    return _integrate_cells(integrand, lo, hi, tol)


# ----------------------------------------------------------------------
# distribution of the envelope error

def envelope_deviation_survival(g: BoundaryFunction, x: float, s: float,
                                n: float, beta: float, R: float,
                                tol: float = 1e-10) -> float:
    """Probability that the cone envelope of the boundary process exceeds
    ``g(x) + s``: ``exp(-n * integral of (s - R|xi - x|**beta + g(x) -
    g(xi))_+ d xi)``.  Exact for every boundary; the oracle for the
    distributional tests."""
    if s < 0:
        raise ValueError(f"deviation must be nonnegative, got s={s}")
    if s == 0.0:
        return 1.0
    gx = float(g(x))

    def integrand(xi):
        return max(s - R * abs(xi - x) ** beta + gx - float(g(xi)), 0.0)

    # the integrand vanishes outside the cone's reach around x; flag the
    # support endpoints or narrow spikes slip through the quadrature
    reach = ((s + gx - g.g_min) / R) ** (1.0 / beta)
    pts = [p for p in (x - reach, x, x + reach) if 0.0 < p < 1.0]
    area, _ = quad(integrand, 0.0, 1.0, points=pts or None,
                   epsabs=tol, limit=200)
    return float(np.exp(-n * area))
