"""Backend selection for the hot decoding kernels.

``FECPARETO_BACKEND=numpy`` forces the vectorized numpy fallback; the default
is numba when it imports cleanly.
"""
import logging
import os

_requested = os.environ.get("FECPARETO_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"FECPARETO_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    logging.getLogger("numba").setLevel(logging.WARNING)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None
    HAVE_NUMBA = False

DEFAULT_BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def njit(func):
    """``numba.njit(cache=True, nogil=True)`` if numba is present, else identity."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def resolve_backend(backend=None):
    backend = DEFAULT_BACKEND if backend is None else backend
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
