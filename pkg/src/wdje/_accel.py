"""Kernel acceleration switch.

Hot numeric kernels (the exact transport simplex and the Sinkhorn scaling
loop) ship in two flavours: a numba ``@njit`` build and a plain
numpy/Python build.  The environment variable ``WDJE_NUMBA`` picks the
default at import time:

* unset, ``1``, ``true``, ``on``  -> use numba when importable
* ``0``, ``false``, ``off``       -> pure numpy/Python fallback

Both flavours stay importable regardless of the flag so benchmarks and
parity tests can compare them directly.
"""

from __future__ import annotations

import os


def _env_wants_numba() -> bool:
    raw = os.environ.get("WDJE_NUMBA", "1").strip().lower()
    return raw not in ("0", "false", "off", "no")


try:
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    NUMBA_AVAILABLE = False

NUMBA_ENABLED = NUMBA_AVAILABLE and _env_wants_numba()


def jit_kernel(func):
    """Compile ``func`` with numba when available; otherwise return it as-is.

    The compiled object is created eagerly-lazily (numba compiles on first
    call), cached on disk so repeat runs skip compilation.
    """
    if not NUMBA_AVAILABLE:
        return func
    return _njit(cache=True)(func)
