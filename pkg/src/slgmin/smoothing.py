"""Smoothed Lovász extensions and gradients for the potential building blocks.

For a threshold potential with weights ``w`` and level ``y``, the extension
restricted to nonnegative points is ``max{v . x : 0 <= v <= w, v . 1 = y}``.
Subtracting a quadratic ``mu/2 ||v||^2`` from the objective makes the max a
projection, so the smoothed extension has a unique maximizer

    v* = min(max((x - t* 1) / mu, 0), w)

where the scalar shift ``t*`` is chosen so the clipped mass equals ``y``.
``v*`` is simultaneously the gradient of the smoothed extension.  The mass
as a function of the shift is continuous, piecewise linear and nonincreasing,
so ``t*`` is found exactly by sorting the 2s candidate breakpoints of the
support and resolving the containing linear segment in closed form.

General concave potentials reduce to an integral of threshold potentials over
the level; since the level-parametrized gradient ``g(y)`` is piecewise linear
with at most ``2s + 2`` breakpoints, the integral telescopes into the finite
sum implemented by :func:`smoothed_concave`.

All routines accept arbitrary finite ``x`` (not just cube points): the
optimality certificates evaluate gradients at points shifted outside the
cube, and every formula here remains valid there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleThresholdError
from .model import ConcavePotential, DecomposableFunction

_MASS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ValueGrad:
    """Value of a smoothed extension at a point together with its gradient."""

    value: float
    grad: np.ndarray


@dataclass(frozen=True, eq=False)
class BreakpointProfile:
    """Level-parametrized gradient of a smoothed threshold at a fixed point.

    ``ts`` are the shift breakpoints (descending), ``ys`` the matching levels
    (increasing from 0 to the total weight) and ``thetas[i]`` the gradient on
    the support at level ``ys[i]``.  Between consecutive levels the gradient
    is linear, so interpolation recovers it anywhere.  Zero-length level
    intervals are removed; at most ``2s + 2`` rows remain for support size s.
    """

    indices: np.ndarray
    ts: np.ndarray
    ys: np.ndarray
    thetas: np.ndarray
    total: float

    def grad_at(self, y: float) -> np.ndarray:
        """Gradient on the support at level ``y`` by linear interpolation."""
        ys = self.ys
        if ys.size == 1:
            return self.thetas[0].copy()
        y = min(max(y, 0.0), self.total)
        i = int(np.searchsorted(ys, y, side="right")) - 1
        i = min(max(i, 0), ys.size - 2)
        span = ys[i + 1] - ys[i]
        frac = 0.0 if span <= 0 else (y - ys[i]) / span
        return self.thetas[i] + frac * (self.thetas[i + 1] - self.thetas[i])


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not np.isfinite(mu) or mu <= 0:
        raise ValueError(f"smoothing parameter mu must be positive, got {mu}")
    return mu


def _support_arrays(x, w):
    x = np.asarray(x, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    if x.shape != w.shape:
        raise ValueError("x and w must have the same length")
    if np.any(w < 0) or np.any(w > 1 + 1e-12):
        raise ValueError("weights must lie in [0, 1]")
    idx = np.nonzero(w > 0)[0]
    return x, idx, x[idx], np.minimum(w[idx], 1.0)


def dual_mass(x, w, mu, t: float) -> float:
    """Total clipped mass ``min(max((x - t 1)/mu, 0), w) . 1``.

    Continuous, piecewise linear and nonincreasing in ``t``; ranges from
    ``w . 1`` (all entries saturated) down to 0.
    """
    mu = _check_mu(mu)
    _, _, xs, ws = _support_arrays(x, w)
    return float(np.minimum(np.maximum((xs - t) / mu, 0.0), ws).sum())


def _solve_shift_support(xs: np.ndarray, ws: np.ndarray, mu: float, y: float) -> float:
    """Shift ``t`` with clipped mass exactly ``y``; ``y`` already in [0, total].

    Sorts the 2s activation/saturation breakpoints and sweeps downward,
    maintaining the active-index count and partial sums so each linear
    segment is solved in closed form.  Conventions for non-unique shifts:
    y = 0 returns the largest entry, y = total the smallest saturation
    point, and a root landing on a flat segment returns its midpoint.
    """
    total = float(ws.sum())
    if y <= 0:
        return float(xs.max())
    if y >= total:
        return float((xs - mu * ws).min())
    acts = xs
    sats = xs - mu * ws
    ts = np.concatenate([acts, sats])
    dm = np.concatenate([np.ones(xs.size), -np.ones(xs.size)])
    dsx = np.concatenate([xs, -xs])
    dsw = np.concatenate([np.zeros(xs.size), ws])
    order = np.argsort(-ts, kind="stable")
    ts = ts[order]
    m = np.cumsum(dm[order])
    sx = np.cumsum(dsx[order])
    sw = np.cumsum(dsw[order])
    # mass at the lower end of each inter-event segment
    lo = ts[1:]
    mass_lo = sw[:-1] + (sx[:-1] - m[:-1] * lo) / mu
    hits = np.nonzero(mass_lo >= y)[0]
    if hits.size == 0:
        # only possible through rounding; y is then numerically the total
        return float(sats.min())
    i = int(hits[0])
    if m[i] > 0:
        t = (sx[i] - mu * (y - sw[i])) / m[i]
        return float(min(max(t, lo[i]), ts[i]))
    # flat segment carrying exactly the requested mass
    return float(0.5 * (lo[i] + ts[i]))


def solve_shift(x, w, mu, y) -> float:
    """Shift ``t`` whose clipped mass equals the level ``y``.

    Cost is O(s log s) in the support size.  Raises
    :class:`InfeasibleThresholdError` when ``y`` lies outside
    ``[0, w . 1]`` beyond a 1e-9 relative slack.
    """
    mu = _check_mu(mu)
    _, _, xs, ws = _support_arrays(x, w)
    total = float(ws.sum())
    y = _check_level(y, total)
    if xs.size == 0:
        return 0.0
    return _solve_shift_support(xs, ws, mu, y)


def _check_level(y, total: float) -> float:
    y = float(y)
    tol = _MASS_TOL * max(1.0, total)
    if not np.isfinite(y) or y < -tol or y > total + tol:
        raise InfeasibleThresholdError(f"level y={y} outside [0, {total}]")
    return min(max(y, 0.0), total)


def _vstar_support(xs, ws, mu, y):
    """Maximizing dual vector and smoothed value on the support."""
    if xs.size == 0 or y <= 0:
        v = np.zeros(xs.size)
        return v, 0.0
    t = _solve_shift_support(xs, ws, mu, y)
    v = np.minimum(np.maximum((xs - t) / mu, 0.0), ws)
    value = float(v @ xs - 0.5 * mu * (v @ v))
    return v, value


def smoothed_threshold(x, w, y, mu) -> ValueGrad:
    """Smoothed extension of ``min(y, w . e_A)`` and its gradient at ``x``.

    The gradient is the projection-characterized maximizer ``v*``; the value
    is ``v* . x - mu/2 ||v*||^2``.
    """
    mu = _check_mu(mu)
    x, idx, xs, ws = _support_arrays(x, w)
    y = _check_level(y, float(ws.sum()))
    v, value = _vstar_support(xs, ws, mu, y)
    grad = np.zeros(x.size)
    grad[idx] = v
    return ValueGrad(value, grad)


def two_potential_grad(x, k: int, l: int, mu) -> np.ndarray:
    """Closed-form gradient of the smoothed unit pair threshold on {k, l}.

    Equals ``e_k`` when ``x[k] >= x[l] + mu``, ``e_l`` in the mirrored case,
    and otherwise splits the unit mass linearly in ``x[k] - x[l]``.
    """
    mu = _check_mu(mu)
    if k == l:
        raise ValueError("pair potential needs two distinct indices")
    x = np.asarray(x, dtype=float).ravel()
    grad = np.zeros(x.size)
    vk = min(max(0.5 + (x[k] - x[l]) / (2.0 * mu), 0.0), 1.0)
    grad[k] = vk
    grad[l] = 1.0 - vk
    return grad


def threshold_profile(x, w, mu) -> BreakpointProfile:
    """All level breakpoints of the smoothed threshold gradient at ``x``.

    Shift candidates are the support entries and their saturation points;
    mapped to levels they cover [0, w . 1] with the gradient linear in the
    level on each interval.
    """
    mu = _check_mu(mu)
    x, idx, xs, ws = _support_arrays(x, w)
    if idx.size == 0:
        return BreakpointProfile(idx, np.zeros(1), np.zeros(1),
                                 np.zeros((1, 0)), 0.0)
    cand = np.unique(np.concatenate([xs, xs - mu * ws]))[::-1]
    vmat = np.minimum(np.maximum((xs[None, :] - cand[:, None]) / mu, 0.0), ws)
    ys = vmat.sum(axis=1)
    total = float(ws.sum())
    keep = np.ones(cand.size, dtype=bool)
    keep[1:] = np.diff(ys) > 1e-15 * max(1.0, total)
    return BreakpointProfile(idx, cand[keep], ys[keep], vmat[keep], total)


def smoothed_concave(x, p: ConcavePotential, mu) -> ValueGrad:
    """Smoothed extension of a piecewise-linear concave potential at ``x``.

    The gradient is the telescoped sum ``sum_i (g(y_i) - g(y_{i-1}))
    (phi(y_i) - phi(y_{i-1})) / (y_i - y_{i-1})`` over the union of the
    gradient profile levels and the curve breakpoints.  The value uses the
    equivalent finite threshold decomposition (final slope times the linear
    part plus slope drops times smoothed threshold values at the interior
    kinks), which keeps value and gradient exactly consistent.
    """
    mu = _check_mu(mu)
    x = np.asarray(x, dtype=float).ravel()
    idx = p.indices
    grad = np.zeros(x.size)
    if idx.size == 0 or p.curve.domain_end <= 0:
        return ValueGrad(0.0, grad)
    xs = x[idx]
    ws = p.weights
    total = float(ws.sum())
    profile = threshold_profile(x, p.dense_weights(x.size), mu)

    levels = np.unique(np.concatenate([profile.ys, np.minimum(p.curve.ts, total)]))
    keep = np.ones(levels.size, dtype=bool)
    keep[1:] = np.diff(levels) > 1e-15 * max(1.0, total)
    levels = levels[keep]
    phis = p.curve.value(levels)
    gs = np.array([profile.grad_at(y) for y in levels])
    dy = np.diff(levels)
    if dy.size:
        coef = np.diff(phis) / dy
        g_support = (np.diff(gs, axis=0) * coef[:, None]).sum(axis=0)
    else:
        g_support = np.zeros(idx.size)
    grad[idx] = g_support

    fin = p.curve.final_slope
    value = fin * float(ws @ xs)
    kink_ts, drops = p.curve.kinks()
    for y_m, drop in zip(kink_ts, drops):
        if drop <= 0:
            continue
        v = profile.grad_at(min(y_m, total))
        value += drop * float(v @ xs - 0.5 * mu * (v @ v))
    return ValueGrad(value, grad)


def curvature_mass(f: DecomposableFunction) -> float:
    """Total concave curvature of ``f``: sum of threshold coefficients plus
    each curve's initial-minus-final slope.

    This is the constant controlling both the gradient Lipschitz bound
    (mass / mu) and the default smoothing strength in the solver.
    """
    total = sum(p.d for p in f.thresholds)
    total += sum(p.curve.initial_slope - p.curve.final_slope for p in f.concaves)
    return float(total)


def _pair_batch_value_grad(x, ks, ls, ds, mu, grad_out):
    """Vectorized closed form for all unit pair thresholds at once."""
    diff = x[ks] - x[ls]
    vk = np.clip(0.5 + diff / (2.0 * mu), 0.0, 1.0)
    vl = 1.0 - vk
    value = float(ds @ (vk * x[ks] + vl * x[ls] - 0.5 * mu * (vk * vk + vl * vl)))
    n = grad_out.size
    grad_out += np.bincount(ks, weights=ds * vk, minlength=n)
    grad_out += np.bincount(ls, weights=ds * vl, minlength=n)
    return value


def smoothed_objective(f: DecomposableFunction, x, mu) -> ValueGrad:
    """Smoothed extension of the whole decomposable function at ``x``.

    Aggregates the modular part, every threshold potential scaled by its
    coefficient and every concave potential.  Reduction order is fixed
    (pair batch, then remaining thresholds, then concaves, in declaration
    order) so repeated runs are bitwise identical.
    """
    mu = _check_mu(mu)
    x = np.asarray(x, dtype=float).ravel()
    if x.size != f.n:
        raise ValueError(f"point has length {x.size}, expected {f.n}")
    grad = f.c.copy()
    value = float(f.c @ x)
    (ks, ls, ds), general = f._threshold_groups
    if ks.size:
        value += _pair_batch_value_grad(x, ks, ls, ds, mu, grad)
    for p in general:
        xs = x[p.indices]
        v, val = _vstar_support(xs, p.weights, mu, p.y)
        value += p.d * val
        grad[p.indices] += p.d * v
    for p in f.concaves:
        res = smoothed_concave(x, p, mu)
        value += res.value
        grad += res.grad
    return ValueGrad(value, grad)
