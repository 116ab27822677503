"""Optional numba acceleration.

Set ``KOLMO_DISABLE_NUMBA=1`` to run every kernel as plain Python/numpy.
The flag is read once, at import time.
"""
import os

_FLAG = os.environ.get("KOLMO_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if DISABLED:
        raise ImportError("numba disabled by KOLMO_DISABLE_NUMBA")
    import numba

    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when available, identity otherwise.

    Usable bare (``@maybe_njit``) or with options (``@maybe_njit(cache=True)``).
    """
    if len(args) == 1 and callable(args[0]) and not kwargs:
        fn = args[0]
        return numba.njit(fn) if HAS_NUMBA else fn

    def wrap(fn):
        return numba.njit(*args, **kwargs)(fn) if HAS_NUMBA else fn

    return wrap
