"""Kernel backend selection.

Hot numeric kernels (the game VM, network forward/backward passes, the SGD
epoch loop) are written as nopython-compatible functions and compiled with
numba by default.  Setting ``EVOPLAY_BACKEND=numpy`` skips compilation and
runs the same source as plain Python/numpy — slower, but dependency-light
and handy for debugging.  ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os
import warnings

_VALID = ("numba", "numpy")

BACKEND = os.environ.get("EVOPLAY_BACKEND", "numba").lower()
if BACKEND not in _VALID:
    raise RuntimeError(
        f"EVOPLAY_BACKEND must be one of {_VALID}, got {BACKEND!r}"
    )

if BACKEND == "numba":
    try:
        from numba import njit as _njit

        def jit(func):
            return _njit(cache=True)(func)

    except ImportError:  # pragma: no cover - numba is a hard dependency
        warnings.warn("numba unavailable, falling back to the numpy backend")
        BACKEND = "numpy"

if BACKEND == "numpy":

    def jit(func):
        return func


def py_func(kernel):
    """Return the uncompiled source of a kernel (itself on the numpy backend)."""
    return getattr(kernel, "py_func", kernel)
