"""Backend selection for the hot series kernels.

The compiled extension is preferred; set ``HALFHEAT_PURE_PYTHON=1`` to force
the numpy fallback (useful for benchmarking and for platforms without a C
compiler).
"""

import os

from . import _kernels_py

if os.environ.get("HALFHEAT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"

mul = _impl.mul
horner = _impl.horner

__all__ = ["BACKEND", "mul", "horner"]
