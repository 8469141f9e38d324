"""Sampling kernels with a compiled fast path.

The Cython extension ``_ckernels`` is used when it has been built; otherwise
(or when ``GTR_PURE_PYTHON=1`` is set) the numpy implementations in
``_fallback`` are used. :data:`BACKEND` names the active one.
"""
import os

from gtrmodel.kernels import _fallback

if os.environ.get("GTR_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from gtrmodel.kernels import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

inverse_cdf = _impl.inverse_cdf
count_sequential = _impl.count_sequential

__all__ = ["BACKEND", "inverse_cdf", "count_sequential"]
