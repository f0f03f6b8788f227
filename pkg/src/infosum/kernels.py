"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback
is used. Set ``INFOSUM_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
direct_convolve = _kernels_py.direct_convolve
joint_sums = _kernels_py.joint_sums

if not os.environ.get("INFOSUM_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:
        _ckernels = None
    else:
        BACKEND = "cython"
        direct_convolve = _ckernels.direct_convolve
        joint_sums = _ckernels.joint_sums


def available_backends() -> dict:
    """Map backend name to a module exposing ``direct_convolve`` and ``joint_sums``."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels as ck
    except ImportError:
        pass
    else:
        out["cython"] = ck
    return out
