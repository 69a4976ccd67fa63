"""Kernel backend selection.

The hot numeric kernels (Dijkstra, cycle-side classification, portal
selection) exist twice: a numba @njit version and a pure numpy/Python
version with identical semantics. The environment variable PLADO_NUMBA
picks the path at import time:

    PLADO_NUMBA=0   force the pure fallback
    unset / other   use numba when it is importable

`benchmarks/kernel_bench.py` times both paths side by side.
"""
from __future__ import annotations

import os

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("PLADO_NUMBA", "1").lower() not in (
    "0",
    "false",
    "off",
)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "python"
