"""Backend selection for the hot kernels.

Set ``MIXEDFLOW_DISABLE_NUMBA=1`` in the environment to force the pure-numpy
path. The choice is made once, at import time.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("MIXEDFLOW_DISABLE_NUMBA", "").strip().lower() in _FALSY


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise.

    The decorated function is always compiled when numba exists, so both
    backends stay testable in one process; ``USE_NUMBA`` only decides which
    one the public dispatchers call.
    """
    kwargs.setdefault("cache", True)

    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
