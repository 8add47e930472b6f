"""Switch between numba-compiled kernels and their plain Python/numpy fallbacks.

Set ``FAULTSAT_NO_JIT=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``) before import
to run every kernel uninterpreted.  The fallback path runs the exact same code,
so results are bit-identical; it is only slower.
"""

import os

_FLAG = os.environ.get("FAULTSAT_NO_JIT", "").strip().lower()
JIT_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if JIT_DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def kernel(f):
    """Compile ``f`` in nopython mode when enabled, else return it unchanged."""
    if not HAS_NUMBA:
        return f
    return _njit(cache=True, nogil=True)(f)


def jit_enabled():
    return HAS_NUMBA
