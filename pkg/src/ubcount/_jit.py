"""JIT toggle for the solver kernels.

The hot kernels in :mod:`ubcount._kernel` are written against flat numpy
arrays so the identical code runs in two modes:

* compiled with numba (default), or
* interpreted as plain Python/numpy when ``UBCOUNT_NO_JIT=1`` is set in
  the environment (``NUMBA_DISABLE_JIT=1`` is honoured as well).

``benchmarks/compare_jit.py`` measures the gap between the two modes.
"""

import os


def _disabled() -> bool:
    val = os.environ.get("UBCOUNT_NO_JIT", "").strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    return os.environ.get("NUMBA_DISABLE_JIT", "").strip() == "1"


JIT_ENABLED = not _disabled()

if JIT_ENABLED:
    from numba import njit
else:
    def njit(*args, **kwargs):  # noqa: D103 - identity decorator stand-in
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap
