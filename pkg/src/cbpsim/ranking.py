"""Ranking of particle positions with lexicographic tie resolution.

Ties are broken by the smaller particle name (1-based index).  A stable sort
on values implements exactly that rule, at O(N log N).  Ties are exact
floating-point equality; no tolerance is applied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RankPermutation", "rank_permutation", "ranked_and_gaps"]


@dataclass(frozen=True)
class RankPermutation:
    """names[k-1] is the (1-based) name of the k-th ranked particle."""

    names: tuple[int, ...]

    def __post_init__(self):
        n = len(self.names)
        if sorted(self.names) != list(range(1, n + 1)):
            raise ValueError("ranking must be a permutation of 1..N")

    def __len__(self) -> int:
        return len(self.names)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Reorder positions into ranked order."""
        return np.asarray(x)[np.array(self.names) - 1]


def _as_positions(x, min_len: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"positions must be a 1-d vector, got shape {arr.shape}")
    if arr.size < min_len:
        raise ValueError(f"need at least {min_len} positions, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("positions must be finite")
    return arr


def rank_permutation(x) -> RankPermutation:
    """Unique ranking permutation of x, ties resolved by smaller name."""
    arr = _as_positions(x, 1)
    order = np.argsort(arr, kind="stable")
    return RankPermutation(tuple(int(i) + 1 for i in order))


def ranked_and_gaps(x) -> tuple[np.ndarray, np.ndarray]:
    """Sorted positions Y and consecutive gaps Z = diff(Y) (all >= 0)."""
    arr = _as_positions(x, 2)
    y = np.sort(arr, kind="stable")
    return y, np.diff(y)
