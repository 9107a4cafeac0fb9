"""Kernel backend selection.

Prefers the compiled extension; falls back to the NumPy twin when the
extension was not built. ``quanton.kernel_backend()`` reports which one won.
"""

from __future__ import annotations

import os

if os.environ.get("QUANTON_FORCE_PYTHON_KERNELS"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels


def kernel_backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return kernels.BACKEND
