"""Shared test utilities: independent oracles and seeded instance builders.

The oracles here deliberately avoid the library's fast paths: the projection
oracle enumerates active sets of the constrained quadratic program, the
gradient oracle uses central finite differences of the value, and expected
minima come from exhaustive enumeration.
"""

from __future__ import annotations

import itertools

import numpy as np

from slgmin import (ConcaveCurve, ConcavePotential, DecomposableFunction,
                    ThresholdPotential, curvature_mass, generate_cut_instance,
                    graph_cut, random_modular, regions_objective,
                    smoothed_objective)


def qp_projection_oracle(x, w, y, mu):
    """Maximizer of ``v . x - mu/2 ||v||^2`` over ``{0 <= v <= w, v . 1 = y}``.

    Exhaustive search over active-set partitions (zero / free / at-bound) of
    the support; the stationarity equation fixes the shift on the free part.
    Exponential in the support size, which the tests keep small.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    idx = np.nonzero(w > 0)[0]
    xs, ws = x[idx], w[idx]
    s = idx.size
    v_full = np.zeros(x.size)
    if s == 0 or y <= 0:
        return v_full
    tol = 1e-10 * max(1.0, float(ws.sum()))
    for labels in itertools.product((0, 1, 2), repeat=s):
        lab = np.array(labels)
        zero, free, bound = lab == 0, lab == 1, lab == 2
        mass_bound = float(ws[bound].sum())
        if free.sum() == 0:
            if abs(mass_bound - y) > tol:
                continue
            lo = float(xs[zero].max()) if zero.any() else -np.inf
            hi = float((xs[bound] - mu * ws[bound]).min()) if bound.any() else np.inf
            if lo > hi + tol:
                continue
            t = min(max(0.0, lo), hi)
        else:
            t = (float(xs[free].sum()) - mu * (y - mass_bound)) / free.sum()
            vf = (xs[free] - t) / mu
            if np.any(vf < -tol) or np.any(vf > ws[free] + tol):
                continue
            if zero.any() and float(xs[zero].max()) > t + tol:
                continue
            if bound.any() and float((xs[bound] - mu * ws[bound]).min()) < t - tol:
                continue
        v = np.minimum(np.maximum((xs - t) / mu, 0.0), ws)
        if abs(float(v.sum()) - y) <= 1e-8 * max(1.0, y):
            v_full[idx] = v
            return v_full
    raise AssertionError("no feasible active set found")


def finite_difference_grad(f, x, mu, step=None):
    """Central differences of the smoothed objective value."""
    x = np.asarray(x, dtype=float)
    if step is None:
        step = 1e-6 * max(1.0, float(np.linalg.norm(x)))
    grad = np.zeros(x.size)
    for k in range(x.size):
        e = np.zeros(x.size)
        e[k] = step
        up = smoothed_objective(f, x + e, mu).value
        dn = smoothed_objective(f, x - e, mu).value
        grad[k] = (up - dn) / (2.0 * step)
    return grad


def random_threshold(rng, n, unit_level=False):
    size = int(rng.integers(1, min(n, 6) + 1))
    idx = rng.choice(n, size=size, replace=False)
    w = rng.uniform(0.1, 1.0, size)
    mass = float(w.sum())
    top = min(1.0, mass) if unit_level else mass
    y = float(rng.uniform(0.05, 0.95)) * top
    d = float(rng.uniform(0.2, 2.0))
    return ThresholdPotential(np.sort(idx), w[np.argsort(idx)], y=y, d=d)


def random_concave(rng, n, max_mass=None):
    size = int(rng.integers(2, min(n, 6) + 1))
    idx = np.sort(rng.choice(n, size=size, replace=False))
    w = rng.uniform(0.1, 1.0, size)
    if max_mass is not None:
        w *= float(rng.uniform(0.3, 1.0)) * max_mass / float(w.sum())
    T = float(w.sum())
    kind = int(rng.integers(0, 3))
    scale = float(rng.uniform(0.5, 2.0))
    if kind == 0:
        fn = lambda s: scale * np.sqrt(s + 1e-3)
    elif kind == 1:
        fn = lambda s: scale * np.log1p(s)
    else:
        y0 = float(rng.uniform(0.2, 0.8)) * T
        fn = lambda s: scale * min(s, y0)
    curve = ConcaveCurve.from_function(fn, T, num=int(rng.integers(8, 24)))
    return ConcavePotential(idx, w, curve)


def random_instance(seed, n=None, unit_levels=False):
    """Mixed seeded instance: thresholds, concaves, cut edges, region terms.

    ``unit_levels`` restricts every threshold level and concave domain to at
    most 1, the regime where the classical uniform smoothing bound applies.
    """
    rng = np.random.default_rng(seed)
    if n is None:
        n = int(rng.integers(4, 13))
    c = rng.uniform(-1.0, 1.0, n)
    thresholds = [random_threshold(rng, n, unit_level=unit_levels)
                  for _ in range(int(rng.integers(1, 5)))]
    concaves = []
    if rng.uniform() < 0.7:
        concaves = [random_concave(rng, n, max_mass=1.0 if unit_levels else None)
                    for _ in range(int(rng.integers(1, 3)))]
    # sprinkle cut edges (always unit level)
    for _ in range(int(rng.integers(0, n))):
        k, l = rng.choice(n, size=2, replace=False)
        d = float(rng.uniform(0.1, 1.0))
        c[k] -= d
        c[l] -= d
        thresholds.append(ThresholdPotential(
            np.sort([k, l]), np.ones(2), y=1.0, d=2.0 * d))
    if not unit_levels and rng.uniform() < 0.5 and n >= 3:
        size = int(rng.integers(3, min(n, 6) + 1))
        region = rng.choice(n, size=size, replace=False)
        reg = regions_objective(n, [region])
        c += reg.c
        thresholds.extend(reg.thresholds)
    return DecomposableFunction(n, c, thresholds=tuple(thresholds),
                                concaves=tuple(concaves))


def random_cut_function(seed, nodes, density=0.4, modular=1.0):
    graph = generate_cut_instance(nodes, density, (0.2, 1.0), seed)
    c = random_modular(nodes, modular, seed + 1)
    return graph_cut(graph, c)


def relative_epsilon(f, rel=1e-3):
    return rel * curvature_mass(f)
