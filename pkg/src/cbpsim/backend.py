"""Kernel backend selection: compiled extension if importable, numpy otherwise.

Set the environment variable ``CBPSIM_KERNEL=python`` before import to force
the fallback (used by the benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CBPSIM_KERNEL", "").lower() == "python":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py

COMPILED: bool = kernels.COMPILED

advance_batch = kernels.advance_batch
