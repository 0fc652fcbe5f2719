"""Elimination backend selection.

The compiled kernel (supercohom._speedups, built from Cython) is used when
importable; setting SUPERCOHOM_PURE=1 in the environment forces the pure
Python fallback.  Both implement the same algorithms and produce identical
output, which tests/test_kernels.py verifies.
"""

import os

from . import _kernel_py

if os.environ.get("SUPERCOHOM_PURE"):
    _impl = _kernel_py
else:
    try:
        from . import _speedups as _impl
    except ImportError:  # pragma: no cover - build dependent
        _impl = _kernel_py

rref_pairs = _impl.rref_pairs
dense_int_rank = _impl.dense_int_rank


def backend_name():
    return _impl.BACKEND_NAME


def available_backends():
    """Name -> module for every importable kernel (for tests/benchmarks)."""
    out = {"pure": _kernel_py}
    try:
        from . import _speedups

        out["compiled"] = _speedups
    except ImportError:  # pragma: no cover - build dependent
        pass
    return out
