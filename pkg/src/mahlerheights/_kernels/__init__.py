"""Numerical kernels with an optional compiled fast path.

The compiled extension (``_core``) is used when it built successfully;
otherwise the numpy reference (``_ref``) takes over.  Setting the
environment variable ``MAHLERHEIGHTS_PURE_PYTHON=1`` forces the reference
backend even when the extension is available.  ``BACKEND`` reports which
one is active.
"""

import os


def _force_pure() -> bool:
    value = os.environ.get("MAHLERHEIGHTS_PURE_PYTHON", "")
    return value.strip().lower() not in ("", "0", "false", "no")


if _force_pure():
    from . import _ref as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _ref as _impl

        BACKEND = "python"

aberth_iterate = _impl.aberth_iterate
polyval_points = _impl.polyval_points
log_abs_sum = _impl.log_abs_sum

__all__ = ["BACKEND", "aberth_iterate", "polyval_points", "log_abs_sum"]
