"""Numba availability and the env switch for the pure-numpy fallback.

Set ``ARRAYCOV_DISABLE_NUMBA=1`` to force the numpy code paths even when
numba is installed (useful for debugging and for the kernel benchmark's
baseline). Missing numba degrades silently to numpy.
"""

import os

_flag = os.getenv("ARRAYCOV_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag not in ("", "0", "false", "no")

try:
    from numba import njit  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = HAS_NUMBA and not NUMBA_DISABLED
