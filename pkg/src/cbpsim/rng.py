"""Deterministic counter-based random streams.

Every trajectory (or sample row) gets its own Philox stream keyed by
(master seed, stream id).  Streams are statistically independent, cheap to
create, and reproduce bit-for-bit for a fixed (seed, stream) pair, which is
what makes failed trajectories replayable and ensembles independent of
batching or scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngSpec"]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSpec:
    """A (master seed, stream id) pair naming one random stream."""

    master_seed: int = 0
    stream: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & _MASK64)
        object.__setattr__(self, "stream", int(self.stream) & _MASK64)

    def substream(self, offset: int) -> "RngSpec":
        """The stream ``offset`` places after this one (trajectory indexing)."""
        return RngSpec(self.master_seed, (self.stream + offset) & _MASK64)

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = np.array([self.master_seed, self.stream], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))
