"""Seeded instance generation with a self-contained pseudorandom generator.

The generator is SplitMix64: state advances by 0x9E3779B97F4A7C15 and the
output mixes with the constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
Floats are the top 53 output bits scaled into [0, 1).  The scheme is fully
specified here so generated fixtures are identical across platforms and
implementations.
"""

from __future__ import annotations

import numpy as np

from .reformulate import WeightedGraph

_MASK = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator; uniform floats in [0, 1)."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_float()


def generate_cut_instance(nodes: int, density: float, weight_range=(0.1, 1.0),
                          seed: int = 0) -> WeightedGraph:
    """Random graph for cut benchmarks, deterministic in the seed.

    Every unordered pair (k, l) with k < l, visited in ascending (k, l)
    order, becomes an edge independently with probability ``density``; the
    weight is drawn uniformly from ``weight_range`` only for included pairs.
    """
    if nodes < 1:
        raise ValueError("need at least one node")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    lo, hi = float(weight_range[0]), float(weight_range[1])
    if lo < 0 or hi < lo:
        raise ValueError("weight range must satisfy 0 <= lo <= hi")
    rng = SplitMix64(seed)
    edges = []
    for k in range(nodes):
        for l in range(k + 1, nodes):
            if rng.next_float() < density:
                edges.append((k, l, rng.uniform(lo, hi)))
    return WeightedGraph(nodes, tuple(edges))


def random_modular(n: int, halfwidth: float, seed: int) -> np.ndarray:
    """Modular vector with entries uniform in [-halfwidth, halfwidth].

    Uses an independent SplitMix64 stream so graph topology and scores can
    be varied separately.
    """
    if halfwidth < 0:
        raise ValueError("halfwidth must be >= 0")
    rng = SplitMix64(seed)
    return np.array([rng.uniform(-halfwidth, halfwidth) for _ in range(n)])
