"""Domain model for decomposable submodular set functions.

A decomposable function on a ground set {0, ..., n-1} is a modular part
``c . e_A`` plus a sum of concave transforms of nonnegative modular
functions.  Two kinds of building blocks are supported:

* threshold potentials ``d * min(y, w . e_A)`` with weights ``0 <= w <= 1``,
* general concave potentials ``phi(w . e_A)`` with ``phi`` piecewise linear
  and concave on ``[0, w . 1]``.

The module also carries the generic oracle-based routines that work for any
set function: the Lovász extension with a subgradient, exhaustive
minimization, and an exhaustive submodularity check.  Subsets are plain
``frozenset`` objects; an oracle is any callable mapping a frozenset of
indices to a float with ``oracle(frozenset()) == 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapacityError, InfeasibleThresholdError, NotConcaveError

Oracle = Callable[[frozenset], float]

#: hard cap for 2^n enumeration
BRUTE_FORCE_MAX_N = 24
#: hard cap for the all-pairs submodularity check
SUBMODULARITY_CHECK_MAX_N = 14

_ENUM_CHUNK = 1 << 16


def indicator(n: int, members: Iterable[int]) -> np.ndarray:
    """0/1 vector of length ``n`` for a set of indices.

    Raises ValueError when an index falls outside ``0..n-1``.
    """
    ind = np.zeros(n)
    idx = np.fromiter((int(k) for k in members), dtype=np.intp)
    if idx.size:
        if idx.min() < 0 or idx.max() >= n:
            raise ValueError(f"invalid subset: index out of range for n={n}")
        ind[idx] = 1.0
    return ind


def subset_from_indicator(ind: Sequence[float]) -> frozenset:
    """Inverse of :func:`indicator` for 0/1 vectors."""
    arr = np.asarray(ind)
    return frozenset(int(k) for k in np.nonzero(arr > 0.5)[0])


def subset_from_mask(mask: int, n: int) -> frozenset:
    return frozenset(k for k in range(n) if (mask >> k) & 1)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ThresholdPotential:
    """Sparse threshold potential ``A -> d * min(y, sum_k w[k] * [k in A])``.

    Weights are stored on their support as parallel ``indices``/``weights``
    arrays.  Invariants enforced at construction: indices unique, weights in
    (0, 1] (zero-weight entries are dropped), ``0 <= y <= sum(weights)`` and
    ``d >= 0``.  Degenerate potentials (empty support, y = 0 or d = 0) are
    legal and contribute zero.
    """

    indices: np.ndarray
    weights: np.ndarray
    y: float
    d: float

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if idx.shape != w.shape:
            raise ValueError("indices and weights must have the same length")
        if idx.size and np.unique(idx).size != idx.size:
            raise ValueError("duplicate index in threshold support")
        if not np.all(np.isfinite(w)):
            raise ValueError("threshold weights must be finite")
        if np.any(w < 0) or np.any(w > 1 + 1e-12):
            raise ValueError("threshold weights must lie in [0, 1]")
        keep = w > 0
        idx, w = idx[keep], np.minimum(w[keep], 1.0)
        order = np.argsort(idx)
        idx, w = idx[order], w[order]
        mass = float(w.sum())
        y = float(self.y)
        if not np.isfinite(y) or y < -1e-9 * max(1.0, mass) or y > mass * (1 + 1e-9) + 1e-12:
            raise InfeasibleThresholdError(
                f"threshold level y={y} outside [0, {mass}]")
        y = min(max(y, 0.0), mass)
        d = float(self.d)
        if not np.isfinite(d) or d < 0:
            raise ValueError("threshold coefficient d must be nonnegative")
        object.__setattr__(self, "indices", _readonly(idx))
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_dense(cls, w, y, d) -> "ThresholdPotential":
        w = np.asarray(w, dtype=float)
        idx = np.nonzero(w != 0)[0]
        return cls(idx, w[idx], y, d)

    @property
    def mass(self) -> float:
        """Total weight ``w . 1``."""
        return float(self.weights.sum())

    def dense_weights(self, n: int) -> np.ndarray:
        w = np.zeros(n)
        w[self.indices] = self.weights
        return w

    def value(self, modular: float) -> float:
        return self.d * min(self.y, modular)


@dataclass(frozen=True, eq=False)
class ConcaveCurve:
    """Piecewise-linear concave function on ``[0, T]`` given by breakpoints.

    The stored values are normalized so the curve is 0 at 0; the subtracted
    constant is kept in ``offset`` for reporting.  Breakpoint abscissae must
    start at 0 and increase strictly, and successive slopes must be
    nonincreasing.
    """

    ts: np.ndarray
    vs: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float).ravel()
        vs = np.asarray(self.vs, dtype=float).ravel()
        if ts.size == 0 or ts.shape != vs.shape:
            raise ValueError("curve needs matching, nonempty ts and vs")
        if not (np.all(np.isfinite(ts)) and np.all(np.isfinite(vs))):
            raise ValueError("curve breakpoints must be finite")
        if abs(ts[0]) > 1e-12:
            raise ValueError("curve must start at t=0")
        ts = ts.copy()
        ts[0] = 0.0
        if ts.size > 1:
            dt = np.diff(ts)
            if np.any(dt <= 0):
                raise ValueError("curve breakpoints must increase strictly")
            slopes = np.diff(vs) / dt
            tol = 1e-9 * (1.0 + float(np.abs(slopes).max()))
            if np.any(np.diff(slopes) > tol):
                raise NotConcaveError("curve slopes must be nonincreasing")
        off = float(self.offset) + float(vs[0])
        vs = vs - vs[0]
        object.__setattr__(self, "ts", _readonly(ts))
        object.__setattr__(self, "vs", _readonly(vs))
        object.__setattr__(self, "offset", off)

    @classmethod
    def from_points(cls, points: Iterable[tuple]) -> "ConcaveCurve":
        pts = list(points)
        return cls(np.array([p[0] for p in pts]), np.array([p[1] for p in pts]))

    @classmethod
    def from_function(cls, fn, T: float, num: int = 64) -> "ConcaveCurve":
        """Sample a concave scalar function uniformly on [0, T].

        The samples must themselves be concave; ``num`` points (default 64)
        give the piecewise-linear closure used everywhere else.
        """
        if T < 0 or num < 2:
            raise ValueError("need T >= 0 and num >= 2")
        ts = np.linspace(0.0, T, num)
        vs = np.array([float(fn(t)) for t in ts])
        return cls(ts, vs)

    @property
    def domain_end(self) -> float:
        return float(self.ts[-1])

    @property
    def slopes(self) -> np.ndarray:
        if self.ts.size < 2:
            return np.zeros(0)
        return np.diff(self.vs) / np.diff(self.ts)

    @property
    def initial_slope(self) -> float:
        s = self.slopes
        return float(s[0]) if s.size else 0.0

    @property
    def final_slope(self) -> float:
        s = self.slopes
        return float(s[-1]) if s.size else 0.0

    def kinks(self) -> tuple[np.ndarray, np.ndarray]:
        """Interior breakpoints and their slope drops (clipped to >= 0)."""
        if self.ts.size < 3:
            return np.zeros(0), np.zeros(0)
        s = self.slopes
        drops = np.maximum(s[:-1] - s[1:], 0.0)
        return self.ts[1:-1].copy(), drops

    def value(self, s):
        """Evaluate by linear interpolation; arguments are clamped to [0, T]."""
        return np.interp(s, self.ts, self.vs)

    def with_domain_end(self, T: float) -> "ConcaveCurve":
        """Copy with the last breakpoint snapped to ``T`` (tiny adjustments only)."""
        ts = self.ts.copy()
        ts[-1] = T
        return ConcaveCurve(ts, self.vs.copy(), self.offset)


@dataclass(frozen=True, eq=False)
class ConcavePotential:
    """Concave potential ``A -> curve(sum_k w[k] * [k in A])`` on sparse weights.

    The curve domain must end at the total weight (within 1e-12 * n slack);
    it is snapped to the exact total at construction.
    """

    indices: np.ndarray
    weights: np.ndarray
    curve: ConcaveCurve

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if idx.shape != w.shape:
            raise ValueError("indices and weights must have the same length")
        if idx.size and np.unique(idx).size != idx.size:
            raise ValueError("duplicate index in concave support")
        if np.any(w < 0) or np.any(w > 1 + 1e-12) or not np.all(np.isfinite(w)):
            raise ValueError("concave weights must lie in [0, 1]")
        keep = w > 0
        idx, w = idx[keep], np.minimum(w[keep], 1.0)
        order = np.argsort(idx)
        idx, w = idx[order], w[order]
        mass = float(w.sum())
        tol = max(1e-12 * max(idx.size, 1), 1e-9 * max(1.0, mass))
        if abs(self.curve.domain_end - mass) > tol:
            raise ValueError(
                f"curve domain ends at {self.curve.domain_end}, "
                f"expected total weight {mass}")
        curve = self.curve
        if curve.domain_end != mass:
            curve = curve.with_domain_end(mass)
        object.__setattr__(self, "indices", _readonly(idx))
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "curve", curve)

    @classmethod
    def from_dense(cls, w, curve: ConcaveCurve) -> "ConcavePotential":
        w = np.asarray(w, dtype=float)
        idx = np.nonzero(w != 0)[0]
        return cls(idx, w[idx], curve)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def dense_weights(self, n: int) -> np.ndarray:
        w = np.zeros(n)
        w[self.indices] = self.weights
        return w


@dataclass(frozen=True, eq=False)
class DecomposableFunction:
    """Modular vector plus threshold and concave potentials.

    Instances are immutable, evaluate ``f(empty) == 0`` by construction
    (curves are normalized; dropped constants accumulate in ``offset``),
    and are directly usable as set-function oracles via ``__call__``.
    """

    n: int
    c: np.ndarray
    thresholds: tuple = ()
    concaves: tuple = ()
    offset: float = 0.0

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError("ground set must have n >= 1")
        c = np.asarray(self.c, dtype=float).ravel()
        if c.size != n:
            raise ValueError(f"modular vector has length {c.size}, expected {n}")
        if not np.all(np.isfinite(c)):
            raise ValueError("modular vector must be finite")
        thresholds = tuple(self.thresholds)
        concaves = tuple(self.concaves)
        off = float(self.offset)
        for p in thresholds:
            if not isinstance(p, ThresholdPotential):
                raise TypeError("thresholds must be ThresholdPotential instances")
            if p.indices.size and p.indices.max() >= n:
                raise ValueError("threshold support index out of range")
        for p in concaves:
            if not isinstance(p, ConcavePotential):
                raise TypeError("concaves must be ConcavePotential instances")
            if p.indices.size and p.indices.max() >= n:
                raise ValueError("concave support index out of range")
            off += p.curve.offset
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "c", _readonly(c.copy()))
        object.__setattr__(self, "thresholds", thresholds)
        object.__setattr__(self, "concaves", concaves)
        object.__setattr__(self, "offset", off)

    # -- evaluation ----------------------------------------------------

    def indicator(self, A: Iterable[int]) -> np.ndarray:
        return indicator(self.n, A)

    def evaluate(self, A: Iterable[int]) -> float:
        """Exact value ``c . e_A + sum_j d_j min(y_j, w_j . e_A) + sum_j phi_j(w_j . e_A)``."""
        return self._evaluate_indicator(self.indicator(A))

    def _evaluate_indicator(self, ind: np.ndarray) -> float:
        total = float(self.c @ ind)
        for p in self.thresholds:
            total += p.d * min(p.y, float(p.weights @ ind[p.indices]))
        for p in self.concaves:
            s = float(p.weights @ ind[p.indices])
            total += float(p.curve.value(min(s, p.curve.domain_end)))
        return total

    __call__ = evaluate

    @cached_property
    def value_scale(self) -> float:
        """Upper bound on |f(A)| over all subsets, floored at 1 (tolerance scaling)."""
        bound = float(np.abs(self.c).sum())
        bound += sum(p.d * p.y for p in self.thresholds)
        bound += sum(float(np.abs(p.curve.vs).max()) for p in self.concaves)
        return max(1.0, bound)

    @cached_property
    def _threshold_groups(self):
        """Split thresholds into a vectorizable unit-pair batch and the rest.

        A unit pair is a support of exactly two indices with weights 1 and
        level 1 (the cut-edge shape); those dominate large instances and get
        a batched closed-form gradient.  Order inside each group follows the
        declaration order, so aggregation stays deterministic.
        """
        ks, ls, ds = [], [], []
        general = []
        for p in self.thresholds:
            if (p.indices.size == 2 and p.y == 1.0
                    and p.weights[0] == 1.0 and p.weights[1] == 1.0):
                ks.append(p.indices[0])
                ls.append(p.indices[1])
                ds.append(p.d)
            else:
                general.append(p)
        pairs = (np.array(ks, dtype=np.intp), np.array(ls, dtype=np.intp),
                 np.array(ds, dtype=float))
        return pairs, tuple(general)


def _all_subset_values(oracle: Oracle, n: int) -> np.ndarray:
    """Values of all 2^n subsets, indexed by bitmask."""
    if isinstance(oracle, DecomposableFunction) and oracle.n == n:
        return enumerate_values(oracle)
    out = np.empty(1 << n)
    for mask in range(1 << n):
        out[mask] = oracle(subset_from_mask(mask, n))
    return out


def enumerate_values(f: DecomposableFunction) -> np.ndarray:
    """Vectorized evaluation of ``f`` on every subset, indexed by bitmask.

    Chunked so that memory stays modest up to the enumeration cap.
    """
    n = f.n
    if n > BRUTE_FORCE_MAX_N:
        raise CapacityError(f"refusing to enumerate 2^{n} subsets (cap n={BRUTE_FORCE_MAX_N})")
    total = 1 << n
    out = np.empty(total)
    shifts = np.arange(n, dtype=np.int64)
    for lo in range(0, total, _ENUM_CHUNK):
        hi = min(lo + _ENUM_CHUNK, total)
        masks = np.arange(lo, hi, dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(float)
        vals = bits @ f.c
        for p in f.thresholds:
            s = bits[:, p.indices] @ p.weights
            vals += p.d * np.minimum(p.y, s)
        for p in f.concaves:
            s = bits[:, p.indices] @ p.weights
            vals += p.curve.value(np.minimum(s, p.curve.domain_end))
        out[lo:hi] = vals
    return out


def brute_force_minimize(oracle: Oracle, n: int):
    """Exact minimum of a set function by enumerating all 2^n subsets.

    Returns ``(min_value, argmin_sets)`` where the argmin list contains every
    minimizer, ordered lexicographically as sorted index tuples.  Refuses
    ``n > 24``.
    """
    if n > BRUTE_FORCE_MAX_N:
        raise CapacityError(f"brute force capped at n={BRUTE_FORCE_MAX_N}, got n={n}")
    if n < 1:
        raise ValueError("need n >= 1")
    values = _all_subset_values(oracle, n)
    best = float(values.min())
    masks = np.nonzero(values == values.min())[0]
    tuples = sorted(tuple(k for k in range(n) if (int(m) >> k) & 1) for m in masks)
    return best, [frozenset(t) for t in tuples]


def lovasz_extension(oracle: Oracle, x) -> tuple[float, np.ndarray]:
    """Lovász extension value and one subgradient at ``x``.

    Sorts ``x`` descending (stable, ascending index on ties) and accumulates
    marginal values over the growing prefix sets.  The value is independent
    of how ties are broken; the subgradient is not, and this fixed order
    makes it deterministic.
    """
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    n = x.size
    order = np.argsort(-x, kind="stable")
    subgrad = np.zeros(n)
    value = 0.0
    prev = 0.0
    prefix: set[int] = set()
    for k in order:
        prefix.add(int(k))
        fv = float(oracle(frozenset(prefix)))
        marginal = fv - prev
        value += x[k] * marginal
        subgrad[k] = marginal
        prev = fv
    return value, subgrad


def check_submodular(oracle: Oracle, n: int):
    """Exhaustive test of ``f(A | B) + f(A & B) <= f(A) + f(B)`` over all pairs.

    Returns ``(ok, witness)`` where ``witness`` is a violating ``(A, B)``
    pair of frozensets or None.  Violations are tolerated up to
    ``1e-9 * scale`` with ``scale = max(1, max |f|)``.  Capped at n = 14.
    """
    if n > SUBMODULARITY_CHECK_MAX_N:
        raise CapacityError(
            f"submodularity check capped at n={SUBMODULARITY_CHECK_MAX_N}, got n={n}")
    if n < 1:
        raise ValueError("need n >= 1")
    values = _all_subset_values(oracle, n)
    tol = 1e-9 * max(1.0, float(np.abs(values).max()))
    total = 1 << n
    all_masks = np.arange(total, dtype=np.int64)
    for a in range(total):
        union = values[all_masks | a]
        inter = values[all_masks & a]
        slack = union + inter - values[a] - values
        bad = np.nonzero(slack > tol)[0]
        if bad.size:
            b = int(bad[0])
            return False, (subset_from_mask(a, n), subset_from_mask(b, n))
    return True, None
