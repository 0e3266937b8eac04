# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernel.

Same contract and float64 operation order as ``_kernels_py.advance_batch``
(see there), so trajectories are bit-identical across backends.  The ranking
permutation is maintained incrementally by insertion sort, which is O(N)
per step for the nearly sorted positions produced by small time steps.
"""

import numpy as np

from libc.math cimport fabs

COMPILED = True


def advance_batch(double[:, ::1] pos, const double[::1] drifts, double dt, double sqdt,
                  const double[:, :, ::1] inc, double limit):
    """See ``_kernels_py.advance_batch``."""
    cdef Py_ssize_t n_rows = pos.shape[0]
    cdef Py_ssize_t n = pos.shape[1]
    cdef Py_ssize_t steps = inc.shape[1]
    cdef Py_ssize_t b, t, k, j, name
    cdef double x
    cdef bint bad
    perm_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] perm = perm_arr

    for b in range(n_rows):
        # stable full sort of the starting positions (ties keep name order)
        for k in range(n):
            perm[k] = k
        _insertion_sort(pos, b, perm, n)
        for t in range(steps):
            bad = False
            for k in range(n):
                name = perm[k]
                x = pos[b, name] + drifts[k] * dt
                x = x + sqdt * inc[b, t, name]
                pos[b, name] = x
                if not fabs(x) <= limit:  # also catches NaN
                    bad = True
            if bad:
                return b, t
            _insertion_sort(pos, b, perm, n)
    return None


cdef inline void _insertion_sort(double[:, ::1] pos, Py_ssize_t b,
                                 Py_ssize_t[::1] perm, Py_ssize_t n) noexcept:
    # Strict comparison: equal values never move, preserving the stable order
    # established at the start of the trajectory.
    cdef Py_ssize_t k, j, name
    cdef double x
    for k in range(1, n):
        name = perm[k]
        x = pos[b, name]
        j = k
        while j > 0 and pos[b, perm[j - 1]] > x:
            perm[j] = perm[j - 1]
            j -= 1
        perm[j] = name
