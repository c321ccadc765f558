"""Kernel backend selection.

The compiled Cython extension is preferred. Set ``QIPKIT_PURE_PYTHON=1`` to
force the pure-Python fallback (useful for benchmarking and debugging).
"""
import os

from qipkit import _pycore

BACKEND = "python"

if os.environ.get("QIPKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from qipkit import _core as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pycore
else:
    _impl = _pycore

jacobi_eigh = _impl.jacobi_eigh
typical_weights = _impl.typical_weights

__all__ = ["BACKEND", "jacobi_eigh", "typical_weights"]
