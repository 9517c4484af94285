"""Kernel backend selection.

The hot inner loops (order-constraint scan, simplex phase, subset
enumeration) exist twice: a numba ``@njit`` build and a vectorized
pure-numpy build.  The active backend is chosen once at import time:

* ``DOMP_BACKEND=numpy``  force the numpy fallback,
* ``DOMP_BACKEND=numba``  require numba (ImportError if missing),
* unset                   numba when importable, else numpy.

``benchmarks/bench_backends.py`` times the two side by side.
"""

from __future__ import annotations

import importlib
import os

try:
    import numba  # noqa: F401
    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

_VALID = ("numba", "numpy")


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (or the environment default)."""
    if name is None:
        name = os.environ.get("DOMP_BACKEND", "").strip().lower() or None
    if name is None:
        name = "numba" if NUMBA_AVAILABLE else "numpy"
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}, expected one of {_VALID}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise ImportError("numba backend requested but numba is not importable")
    return importlib.import_module(f"domp.backends.{name}_backend")


active = get_backend()
BACKEND_NAME = active.NAME
