"""Optional numba acceleration for the hot kernels.

The kernels in :mod:`ltlq.kernels` are plain numpy functions. By default they
are compiled with ``numba.njit``; setting the environment variable
``LTLQ_DISABLE_NUMBA`` to a non-empty value (or running without numba
installed) executes the very same functions as pure Python/numpy. Both paths
share one implementation, so results are bit-identical either way.
"""

import os


def _numba_enabled() -> bool:
    if os.environ.get("LTLQ_DISABLE_NUMBA"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_enabled()

if NUMBA_ENABLED:
    from numba import njit as _njit

    def maybe_jit(func=None, **options):
        if func is None:
            return lambda f: _njit(f, **options)
        return _njit(func)
else:

    def maybe_jit(func=None, **options):
        if func is None:
            return lambda f: f
        return func
