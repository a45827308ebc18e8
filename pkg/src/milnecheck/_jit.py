"""Optional numba acceleration.

Set ``MILNECHECK_DISABLE_JIT=1`` to run every kernel as plain Python/numpy.
"""
import os

DISABLE_JIT = os.environ.get("MILNECHECK_DISABLE_JIT", "0").strip().lower() in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not DISABLE_JIT


def njit(func):
    """Compile ``func`` with numba when enabled, otherwise return it unchanged.

    The undecorated function stays reachable as ``func.py_func`` in both cases
    so benchmarks can compare the two paths in one process.
    """
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    func.py_func = func
    return func
