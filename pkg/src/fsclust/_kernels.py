"""Kernel backend selection.

The compiled extension is preferred; set ``FSCLUST_PURE_PYTHON=1`` to force
the numpy fallback.
"""
import os

if os.environ.get("FSCLUST_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl
        BACKEND = "python"

pair_hermite_sum = _impl.pair_hermite_sum
kde_grid = _impl.kde_grid

__all__ = ["BACKEND", "pair_hermite_sum", "kde_grid"]
