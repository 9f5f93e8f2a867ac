"""Numba switch.

Set ``EXACTSERIATION_DISABLE_NUMBA=1`` to force the pure numpy/Python code
paths even when numba is importable.
"""
import os
from typing import Any, Callable

_DISABLED = os.environ.get("EXACTSERIATION_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    _numba_njit = None


def njit(**options: Any) -> Callable[[Callable], Callable]:
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if not HAVE_NUMBA:
        return lambda f: f
    options.setdefault("cache", True)
    return _numba_njit(**options)


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
