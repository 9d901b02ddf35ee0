"""Backend selection for the hot kernels.

Kernels in :mod:`morsewig._kernels` are written against the numpy API so that
the same source runs either compiled by numba or as plain numpy.  Set
``MORSEWIG_DISABLE_NUMBA=1`` before importing the package to force the
pure-numpy path (numba is also skipped automatically when it cannot be
imported).
"""

import os

_FLAG = os.environ.get("MORSEWIG_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    import numba
except ImportError:
    numba = None

USE_NUMBA = numba is not None
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(func):
    """Compile ``func`` with ``numba.njit(cache=True)`` when numba is active."""
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
