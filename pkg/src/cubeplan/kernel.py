"""Selects the decode kernel: compiled extension when importable, else pure Python.

Set ``CUBEPLAN_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernel

if os.environ.get("CUBEPLAN_PURE_PYTHON", "") not in ("", "0"):
    decode_kernel = _pykernel.decode_kernel
    BACKEND = "python"
else:
    try:
        from ._ckernel import decode_kernel
        BACKEND = "cython"
    except ImportError:
        decode_kernel = _pykernel.decode_kernel
        BACKEND = "python"

py_decode_kernel = _pykernel.decode_kernel

__all__ = ["decode_kernel", "py_decode_kernel", "BACKEND"]
