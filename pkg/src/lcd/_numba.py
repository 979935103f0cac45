"""Numba on/off switch.

Hot kernels are decorated with @njit from this module.  Setting the environment
variable LCD_NO_NUMBA=1 turns the decorator into a no-op so the same code runs
as plain Python/numpy (slower, bit-compatible).  benchmarks/bench_kernels.py
compares the two paths.
"""

from __future__ import annotations

import os

NUMBA_ENABLED = os.environ.get("LCD_NO_NUMBA", "0") != "1"

if NUMBA_ENABLED:
    try:
        from numba import njit  # noqa: F401
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap
