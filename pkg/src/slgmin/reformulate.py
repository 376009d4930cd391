"""Constructors that translate common problem classes into decomposable form.

Covered here: pairwise potentials (graph cut energies), concave functions of
an intersection cardinality (region potentials and friends), set cover
objectives and a multiclass queueing objective.  Each constructor comes with
an exact finite decomposition into modular parts plus threshold or concave
potentials, so the resulting function evaluates identically to the direct
formula on every subset.

Threshold potentials with nonuniform weights are strictly more expressive
than sums of concave cardinality terms; for instance the single threshold
with weights (1, 2, 3, 4)/4 at level 1 matches no such sum.  That fact is
recorded here for orientation only; nothing below depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import InvalidCurveError, NotConcaveError
from .model import (ConcaveCurve, ConcavePotential, DecomposableFunction,
                    ThresholdPotential)


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with nonnegative edge weights and no self-loops."""

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs n >= 1 nodes")
        seen = []
        for k, l, w in self.edges:
            k, l, w = int(k), int(l), float(w)
            if k == l:
                raise ValueError(f"self-loop at node {k}")
            if not (0 <= k < self.n and 0 <= l < self.n):
                raise ValueError(f"edge ({k}, {l}) out of range for n={self.n}")
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"invalid weight {w} on edge ({k}, {l})")
            seen.append((min(k, l), max(k, l), w))
        object.__setattr__(self, "edges", tuple(seen))

    def cut_value(self, A: Iterable[int]) -> float:
        """Total weight of edges with exactly one endpoint in ``A``."""
        members = set(int(k) for k in A)
        return sum(w for k, l, w in self.edges if (k in members) != (l in members))


@dataclass(frozen=True)
class SetCoverInstance:
    """Ground elements each covering a subset of a base set of size ``m``."""

    m: int
    covers: tuple

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("base set size must be >= 0")
        covers = tuple(frozenset(int(k) for k in B) for B in self.covers)
        for B in covers:
            if any(k < 0 or k >= self.m for k in B):
                raise ValueError("covered element outside the base set")
        object.__setattr__(self, "covers", covers)

    def union_size(self, A: Iterable[int]) -> int:
        out: set[int] = set()
        for i in A:
            out |= self.covers[int(i)]
        return len(out)


class TwoPotentialParts(NamedTuple):
    modular: dict
    threshold: ThresholdPotential
    offset: float


class CardinalityParts(NamedTuple):
    modular: dict
    thresholds: list
    offset: float


def two_potential(k: int, l: int, phi0: float, phi1: float, phi2: float) -> TwoPotentialParts:
    """Decompose ``phi(|A & {k, l}|)`` into a modular part and one threshold.

    The modular slope is ``phi2 - phi1`` on both indices and the threshold
    carries coefficient ``2 phi1 - phi0 - phi2`` at unit level.  The constant
    ``phi0`` is returned as an offset, never folded into values.
    """
    if k == l:
        raise ValueError("pair potential needs two distinct indices")
    d = 2.0 * phi1 - phi0 - phi2
    if d < -1e-12 * max(1.0, abs(phi0), abs(phi1), abs(phi2)):
        raise NotConcaveError(
            f"sequence ({phi0}, {phi1}, {phi2}) is not concave")
    slope = phi2 - phi1
    modular = {int(k): slope, int(l): slope}
    threshold = ThresholdPotential(np.array([k, l]), np.array([1.0, 1.0]),
                                   y=1.0, d=max(d, 0.0))
    return TwoPotentialParts(modular, threshold, float(phi0))


def concave_cardinality(S: Iterable[int], phi: Sequence[float]) -> CardinalityParts:
    """Decompose ``phi(|A & S|)`` for a concave sequence ``phi(0..|S|)``.

    Yields ``|S| - 1`` thresholds at levels 1..|S|-1 with coefficients given
    by the negated second differences of ``phi`` (all nonnegative exactly
    when the sequence is concave) plus a modular slope ``phi(|S|) -
    phi(|S|-1)`` on ``S``.
    """
    S = sorted(set(int(k) for k in S))
    m = len(S)
    phi = [float(v) for v in phi]
    if len(phi) != m + 1:
        raise ValueError(f"need |S|+1 = {m + 1} sequence values, got {len(phi)}")
    scale = max(1.0, max(abs(v) for v in phi))
    for k in range(1, m):
        if 2.0 * phi[k] - phi[k - 1] - phi[k + 1] < -1e-12 * scale:
            raise NotConcaveError(f"sequence not concave at position {k}")
    idx = np.array(S, dtype=np.intp)
    ones = np.ones(m)
    slope = phi[m] - phi[m - 1] if m >= 1 else 0.0
    modular = {k: slope for k in S}
    thresholds = [
        ThresholdPotential(idx, ones, y=float(k),
                           d=max(2.0 * phi[k] - phi[k - 1] - phi[k + 1], 0.0))
        for k in range(1, m)
    ]
    return CardinalityParts(modular, thresholds, phi[0])


def region_potential(R: Iterable[int]) -> CardinalityParts:
    """Decompose the split penalty ``|A & R| * |R \\ A|``.

    Zero when ``A`` contains all of ``R`` or none of it, largest when it
    contains exactly half.
    """
    R = sorted(set(int(k) for k in R))
    m = len(R)
    if m < 1:
        raise ValueError("region must be nonempty")
    phi = [float(k * (m - k)) for k in range(m + 1)]
    return concave_cardinality(R, phi)


def _accumulate(n: int, base: Optional[np.ndarray], parts: Iterable[dict]) -> np.ndarray:
    c = np.zeros(n) if base is None else np.asarray(base, dtype=float).copy()
    for part in parts:
        for k, v in part.items():
            c[k] += v
    return c


def graph_cut(g: WeightedGraph, c=None) -> DecomposableFunction:
    """Cut energy ``c . e_A + sum_edges w_kl * [edge kl is cut by A]``."""
    parts = []
    thresholds = []
    for k, l, w in g.edges:
        mod, thr, _ = two_potential(k, l, 0.0, w, 0.0)
        parts.append(mod)
        thresholds.append(thr)
    return DecomposableFunction(g.n, _accumulate(g.n, c, parts),
                                thresholds=tuple(thresholds))


def regions_objective(n: int, regions: Iterable[Iterable[int]], c=None) -> DecomposableFunction:
    """Modular scores plus split penalties over a family of regions."""
    parts = []
    thresholds = []
    for R in regions:
        mod, thrs, _ = region_potential(R)
        parts.append(mod)
        thresholds.extend(thrs)
    return DecomposableFunction(n, _accumulate(n, c, parts),
                                thresholds=tuple(thresholds))


def set_cover(inst: SetCoverInstance) -> DecomposableFunction:
    """Union-size objective ``|union_{i in A} B_i`` as unit thresholds.

    One threshold per base element, weight 1 on every ground element whose
    cover contains it, level and coefficient 1.
    """
    n = len(inst.covers)
    if n < 1:
        raise ValueError("need at least one ground element")
    thresholds = []
    for k in range(inst.m):
        idx = np.array([i for i in range(n) if k in inst.covers[i]], dtype=np.intp)
        if idx.size == 0:
            continue  # never covered, contributes nothing to any union
        thresholds.append(ThresholdPotential(idx, np.ones(idx.size), y=1.0, d=1.0))
    return DecomposableFunction(n, np.zeros(n), thresholds=tuple(thresholds))


def queueing_objective(c, u, v, curve: ConcaveCurve) -> DecomposableFunction:
    """Objective ``c . e_A + (u . e_A) * phi(v . e_A)`` in decomposable form.

    Requires ``u, v >= 0`` and ``phi`` (given as a piecewise-linear curve)
    nonpositive, nonincreasing and concave.  Builds one concave potential per
    ground element ``j`` with weights ``v + (1 . v) e_j`` and a curve that is
    0 up to the total ``1 . v`` and tracks ``phi(t - 1 . v) - phi(0)``
    beyond; weights are rescaled by their largest entry to respect the unit
    weight bound, with the curve domain rescaled to compensate.  The constant
    ``phi(0)`` moves into the modular part.
    """
    c = np.asarray(c, dtype=float).ravel()
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    n = c.size
    if u.size != n or v.size != n:
        raise ValueError("c, u, v must share one length")
    if np.any(u < 0) or np.any(v < 0):
        raise ValueError("u and v must be nonnegative")
    vs_actual = curve.vs + curve.offset
    if np.any(vs_actual > 1e-12):
        raise InvalidCurveError("curve must be nonpositive")
    if np.any(np.diff(curve.vs) > 1e-12):
        raise InvalidCurveError("curve must be nonincreasing")
    phi0 = float(vs_actual[0])
    V = float(v.sum())
    if V > 0 and abs(curve.domain_end - V) > 1e-9 * max(1.0, V):
        raise InvalidCurveError(
            f"curve domain ends at {curve.domain_end}, expected 1 . v = {V}")
    modular = c + phi0 * u
    concaves = []
    if V > 0 and np.any(curve.vs != 0.0):
        # shifted curve: flat at 0 on [0, V], then the normalized phi
        ts = np.concatenate([[0.0], V + curve.ts])
        vals = np.concatenate([[0.0], curve.vs])
        for j in range(n):
            if u[j] == 0.0:
                continue
            w = v.copy()
            w[j] += V
            s = float(w.max())
            if s <= 0:
                continue
            pot_curve = ConcaveCurve(ts / s, u[j] * vals)
            concaves.append(ConcavePotential.from_dense(w / s, pot_curve))
    return DecomposableFunction(n, modular, concaves=tuple(concaves))
