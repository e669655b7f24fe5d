"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
kernels are used. Setting ``DIONET_KERNELS=python`` forces the fallback.
"""
import os

from . import _pykernels

if os.environ.get("DIONET_KERNELS", "").lower() == "python":
    kernels = _pykernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _pykernels

NAME = "python" if kernels is _pykernels else "cython"
