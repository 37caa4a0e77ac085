"""Backend selection for the state-vector kernels.

The compiled extension is used when importable; setting
``QTELEPORT_PURE_PYTHON=1`` forces the numpy fallback. Both backends
implement the same in-place contract (see ``_kernels_py``), so everything
above this module is backend-agnostic.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("QTELEPORT_PURE_PYTHON", "0") not in ("", "0"):
    _backend = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _backend  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _backend = _kernels_py
        BACKEND = "python"

apply_ctrl_2x2 = _backend.apply_ctrl_2x2
apply_xlayer = _backend.apply_xlayer
bit0_and_total_sq = _backend.bit0_and_total_sq
project_bit = _backend.project_bit


def backend_name() -> str:
    """Name of the kernel backend selected at import ("cython" or "python")."""
    return BACKEND
