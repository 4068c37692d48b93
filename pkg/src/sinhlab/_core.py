"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise the NumPy
implementation is used. Set ``SINHLAB_BACKEND=python`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SINHLAB_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

rect_regular_part = _impl.rect_regular_part
apply_stencil = _impl.apply_stencil
tensor_bilinear = _impl.tensor_bilinear
