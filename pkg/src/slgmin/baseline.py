"""Plain projected-subgradient baseline for benchmark comparisons.

Exists only so the benchmark command can contrast the accelerated smoothed
solver with the textbook nonsmooth method: step ``1/sqrt(t+1)`` along an
exact Lovász-extension subgradient, projected back onto the cube.  One
gradient evaluation per iteration; no smoothing, no certificates.
"""

from __future__ import annotations

import time

import numpy as np

from .certify import round_to_sets
from .model import DecomposableFunction, lovasz_extension
from .solver import TraceRow, project_box, _gap_from_grad

#: cadence for updating the best rounded set in the baseline trace
ROUND_EVERY = 10


def subgradient_minimize(f: DecomposableFunction, epsilon: float,
                         max_iters: int) -> tuple[np.ndarray, list[TraceRow]]:
    """Run the baseline until its linearized gap reaches ``epsilon / 2``.

    The gap column uses the same cube linearization as the smoothed solver,
    which is a valid optimality bound for any subgradient; it is not
    monotone, so the loop usually exhausts ``max_iters`` unless the target
    is loose.  Returns the final point and the trace.
    """
    x = np.full(f.n, 0.5)
    trace: list[TraceRow] = []
    best_value = 0.0
    t0 = time.perf_counter()
    for t in range(max_iters):
        value, grad = lovasz_extension(f, x)
        gap = _gap_from_grad(x, grad)
        if t % ROUND_EVERY == 0:
            _, rounded = round_to_sets(x, f)
            best_value = min(best_value, rounded)
        ms = (time.perf_counter() - t0) * 1e3
        trace.append(TraceRow(t, value, gap, best_value, None, ms))
        if gap <= epsilon / 2.0:
            break
        x = project_box(x - grad / np.sqrt(t + 1.0))
    return x, trace
