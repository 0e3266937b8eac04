"""Linear algebra of the gap process seen as a reflected Brownian motion.

The gap process of a competing-particle system reflects off the faces of the
nonnegative orthant through a tridiagonal matrix R with unit diagonal and
-1/2 off-diagonals.  Candidate exponential rates lambda solve R lambda = mu
with mu_k = g_k - g_{k+1}.  One solution is twice the drift partial sums; the
homogeneous equation R eta = 0 has the null direction eta = (1, 2, 3, ...),
which generates the whole one-parameter family of rate vectors.

R is infinite; all checks here act on truncations.  The last row of a
truncation references a coordinate beyond it, so residuals are only
meaningful on rows 1..n-1, and no claim about inverting R is made.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .drifts import DriftSpec, drift_values, partial_sums

__all__ = [
    "TridiagonalReflection",
    "reflection_apply",
    "particular_solution",
    "null_vector",
    "general_solution_residual",
]


@dataclass(frozen=True)
class TridiagonalReflection:
    """Matrix-free action of the n x n truncation of R."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")

    def apply(self, v) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if arr.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {arr.shape}")
        out = arr.copy()
        out[:-1] -= 0.5 * arr[1:]
        out[1:] -= 0.5 * arr[:-1]
        return out

    def dense(self) -> np.ndarray:
        """Explicit matrix, for small-n comparisons."""
        mat = np.eye(self.n)
        idx = np.arange(self.n - 1)
        mat[idx, idx + 1] = -0.5
        mat[idx + 1, idx] = -0.5
        return mat


def reflection_apply(v) -> np.ndarray:
    """R v for the tridiagonal reflection matrix (row n is truncated)."""
    arr = np.asarray(v, dtype=float)
    return TridiagonalReflection(arr.size).apply(arr)


def particular_solution(spec: DriftSpec, n: int) -> np.ndarray:
    """The rate vector 2(g_1+...+g_k), k = 1..n, solving R lambda = mu."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 2.0 * partial_sums(spec, n)


def null_vector(n: int) -> np.ndarray:
    """The null direction (1, 2, ..., n) of R (rows 1..n-1 vanish)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return np.arange(1.0, n + 1.0)


def general_solution_residual(spec: DriftSpec, a: float, n: int) -> float:
    """Max-norm residual of R lambda = mu for lambda = 2*partial_sums + a*(1..n).

    mu_k = g_k - g_{k+1}.  Row n is excluded: it would reference lambda_{n+1}
    beyond the truncation.
    """
    if n < 3:
        raise ValueError(f"need n >= 3 to check interior rows, got {n}")
    lam = particular_solution(spec, n) + float(a) * null_vector(n)
    g = drift_values(spec, n + 1)
    mu = g[:-2] - g[1:-1]
    resid = reflection_apply(lam)[:-1] - mu
    return float(np.abs(resid).max())
