"""Rank-based drift sequences represented as a finite prefix plus a constant tail.

A drift sequence g_1, g_2, ... assigns a drift to each rank (rank 1 is the
lowest particle).  Storing an explicit prefix and an eventual tail value keeps
every derived quantity (partial sums, running means, their infimum) exactly
computable, and guarantees that g_k deviates from the tail value only finitely
often.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DriftSpec",
    "BUILTIN_DRIFTS",
    "drift_values",
    "partial_sums",
    "mean_drifts",
    "inf_mean_drift",
]


@dataclass(frozen=True)
class DriftSpec:
    """Drift per rank: ``prefix[k-1]`` for ranks k <= len(prefix), ``tail`` after.

    Serialized in configs as ``{"prefix": [1.0], "tail": 0.0}``.
    """

    prefix: tuple[float, ...] = ()
    tail: float = 0.0

    def __post_init__(self):
        prefix = tuple(float(g) for g in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", float(self.tail))
        if not all(math.isfinite(g) for g in prefix):
            raise ValueError("drift prefix values must be finite")
        if not math.isfinite(self.tail):
            raise ValueError("drift tail value must be finite")

    def drift(self, k: int) -> float:
        """Drift of rank k (1-based)."""
        if k < 1:
            raise ValueError(f"rank must be >= 1, got {k}")
        return self.prefix[k - 1] if k <= len(self.prefix) else self.tail

    @classmethod
    def from_dict(cls, data: dict) -> "DriftSpec":
        extra = set(data) - {"prefix", "tail"}
        if extra:
            raise ValueError(f"unknown drift fields: {sorted(extra)}")
        return cls(tuple(data.get("prefix", ())), float(data.get("tail", 0.0)))

    def to_dict(self) -> dict:
        return {"prefix": [float(g) for g in self.prefix], "tail": float(self.tail)}


#: The three named systems used throughout: only the bottom particle is
#: pushed up ("atlas"), no drifts at all ("driftless"), or the bottom
#: particle is pushed down ("inverted-atlas").
BUILTIN_DRIFTS: dict[str, DriftSpec] = {
    "atlas": DriftSpec((1.0,), 0.0),
    "driftless": DriftSpec((), 0.0),
    "inverted-atlas": DriftSpec((-1.0,), 0.0),
}


def drift_values(spec: DriftSpec, n: int) -> np.ndarray:
    """First n drifts g_1..g_n as a float array."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    out = np.full(n, spec.tail)
    m = min(n, len(spec.prefix))
    out[:m] = spec.prefix[:m]
    return out


def partial_sums(spec: DriftSpec, n: int) -> np.ndarray:
    """Partial sums g_1+...+g_k for k = 1..n."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    n0 = len(spec.prefix)
    if n <= n0:
        return np.cumsum(spec.prefix[:n])
    head = np.cumsum(spec.prefix) if n0 else np.zeros(0)
    s0 = head[-1] if n0 else 0.0
    k = np.arange(n0 + 1, n + 1, dtype=float)
    return np.concatenate([head, s0 + (k - n0) * spec.tail])


def mean_drifts(spec: DriftSpec, n: int) -> np.ndarray:
    """Running means (g_1+...+g_k)/k for k = 1..n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return partial_sums(spec, n) / np.arange(1, n + 1)


def inf_mean_drift(spec: DriftSpec) -> float:
    """Infimum over all k >= 1 of the running mean drift, computed exactly.

    Beyond the prefix the running mean moves monotonically from its value at
    the prefix end toward the tail drift, so the infimum is attained on the
    prefix or in the tail limit.
    """
    candidates = [spec.tail]
    n0 = len(spec.prefix)
    if n0:
        candidates.append(float(mean_drifts(spec, n0).min()))
    return min(candidates)
