"""Select the kernel backend at import time.

The compiled extension is used when it was built; setting
``HYPTAIL_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
import os

if os.environ.get("HYPTAIL_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as impl
    BACKEND = "python"
else:
    try:
        from . import _ckernels as impl
        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as impl
        BACKEND = "python"

__all__ = ["impl", "BACKEND"]
