"""
Numba switch.

Hot kernels are written once as plain Python loops and compiled with numba
when it is importable and not disabled. Set ``PRIMESCATTER_DISABLE_NUMBA=1``
to force the pure-numpy paths (useful for debugging and for the benchmark).
"""
import os
import warnings

_DISABLED = os.environ.get("PRIMESCATTER_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

ENABLE_NUMBA = numba is not None and not _DISABLED
CACHE_NUMBA = True

# numba falls back to another threading layer on its own; the notice is noise
warnings.filterwarnings("ignore", message="The TBB threading layer requires TBB version")


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    kwargs.setdefault("cache", CACHE_NUMBA)

    def wrap(func):
        if ENABLE_NUMBA:
            return numba.njit(**kwargs)(func)
        return func

    if len(args) == 1 and callable(args[0]):
        return wrap(args[0])
    return wrap


if ENABLE_NUMBA:
    prange = numba.prange
else:
    prange = range


def backend() -> str:
    return "numba" if ENABLE_NUMBA else "numpy"
