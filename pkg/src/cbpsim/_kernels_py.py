"""Pure-numpy stepping kernel (fallback when the compiled one is absent).

Both kernels advance a batch of trajectories in place through the same
sequence of float64 operations:

    x <- x + drift[rank(x)] * dt        (ranks frozen at step start)
    x <- x + sqrt(dt) * increment

so a given increment array yields bit-identical trajectories on either
backend.  Ranks break ties by particle name (stable sort).
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def advance_batch(pos, drifts, dt, sqdt, inc, limit):
    """Advance every row of ``pos`` through ``inc.shape[1]`` Euler steps.

    pos    : (B, N) named positions, modified in place
    drifts : (N,) drift per rank (rank 1 first)
    inc    : (B, steps, N) unit Gaussian increments
    limit  : overflow guard on |position|

    Returns None, or (row, step) of the first overflow (NaN counts).
    """
    n_rows, n = pos.shape
    steps = inc.shape[1]
    drift_rows = np.broadcast_to(drifts, (n_rows, n))
    by_name = np.empty_like(pos)
    for t in range(steps):
        order = np.argsort(pos, axis=1, kind="stable")
        np.put_along_axis(by_name, order, drift_rows, axis=1)
        pos += by_name * dt
        pos += sqdt * inc[:, t, :]
        amax = np.max(np.abs(pos))
        if not amax <= limit:
            bad = ~(np.abs(pos) <= limit)
            row = int(np.nonzero(bad.any(axis=1))[0][0])
            return row, t
    return None
