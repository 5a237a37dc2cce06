"""Numba switch.

Set ``SLICEISO_DISABLE_JIT=1`` to run every kernel through its pure-numpy
path instead (handy under a debugger, or where numba is unavailable).
"""

import os

JIT_ENABLED = os.environ.get("SLICEISO_DISABLE_JIT", "0").lower() not in ("1", "true", "yes")

try:
    from numba import njit as _numba_njit
except ImportError:  # pragma: no cover
    _numba_njit = None
    JIT_ENABLED = False

NUMBA_AVAILABLE = _numba_njit is not None

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "boundscheck": False,
}


def njit(func=None, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise.

    The compiled and plain variants are both reachable: kernels keep a
    reference to the undecorated python function under ``.py_func``.
    """
    opts = {**numba_default, **kwargs}

    def wrap(f):
        if _numba_njit is None:
            f.py_func = f
            return f
        return _numba_njit(**opts)(f)

    if func is not None:
        return wrap(func)
    return wrap
