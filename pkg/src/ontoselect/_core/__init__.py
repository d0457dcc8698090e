"""Kernel backend selection.

The compiled Cython extension is preferred when importable; otherwise the
numpy fallback is used.  ONTOSELECT_PURE_PYTHON=1 forces the fallback
(useful for benchmarking and for environments without a compiler).
"""

import os

from . import pykernels

if os.environ.get("ONTOSELECT_PURE_PYTHON") == "1":
    _impl = pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = pykernels
        BACKEND = "python"

minkowski_powsum = _impl.minkowski_powsum
split_scan = _impl.split_scan

__all__ = ["BACKEND", "minkowski_powsum", "split_scan", "pykernels"]
