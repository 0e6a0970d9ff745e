"""Backend selection for the subset-enumeration kernels.

The compiled extension is used when importable; ``XXZDROP_PURE=1`` forces
the numpy fallback. Both expose identical functions.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

__all__ = ["BACKEND", "available_backends", "get_backend", "run_chunked"]


def available_backends() -> dict:
    out = {"python": _fallback}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def get_backend(name: str | None = None):
    backends = available_backends()
    if name is None:
        return backends[BACKEND]
    if name not in backends:
        raise ValueError(f"backend {name!r} unavailable (have {sorted(backends)})")
    return backends[name]


if _compiled is not None and not os.environ.get("XXZDROP_PURE"):
    BACKEND = "cython"
else:
    BACKEND = "python"


def chunks(total: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(int(workers), total)) if total else 1
    bounds = np.linspace(0, total, workers + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_chunked(fn, total: int, workers: int) -> None:
    """Call ``fn(start, stop)`` over a partition of ``range(total)``.

    Each call writes a disjoint slice, so results do not depend on the
    worker count.
    """
    parts = chunks(total, workers)
    if len(parts) <= 1:
        for a, b in parts:
            fn(a, b)
        return
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        for fut in [pool.submit(fn, a, b) for a, b in parts]:
            fut.result()
