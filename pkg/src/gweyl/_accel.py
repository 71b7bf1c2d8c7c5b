"""Numba glue: optional JIT with a pure-numpy fallback.

The accelerated kernels in ``_kernels`` come in two flavours, a numba
``@njit`` loop version and a vectorized numpy version.  Selection is by the
``GW_NUMBA`` environment variable: ``GW_NUMBA=0`` forces the numpy path,
anything else (or unset) uses numba when it is importable.  Both paths
produce the same values up to floating-point reassociation; the benchmark
script ``benchmarks/bench_kernels.py`` compares them.
"""

import os

try:
    from numba import njit as _numba_njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

JIT_ENABLED = _HAVE_NUMBA and os.environ.get("GW_NUMBA", "1") != "0"

if JIT_ENABLED:
    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        return _numba_njit(*args, **kwargs)
else:
    def njit(*args, **kwargs):
        # identity decorator so the decorated functions stay plain Python
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap
