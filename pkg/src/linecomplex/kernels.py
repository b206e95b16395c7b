"""Kernel selection.

The Cython extension ``linecomplex._kernels`` is used when it has been built;
otherwise the pure-Python module is used.  Setting ``LINECOMPLEX_PURE=1``
forces the fallback.
"""
import os

from . import _kernels_py as python_kernels

compiled_kernels = None
if os.environ.get("LINECOMPLEX_PURE", "") in ("", "0"):
    try:
        from . import _kernels as compiled_kernels  # type: ignore[no-redef]
    except ImportError:
        compiled_kernels = None

_impl = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = "cython" if compiled_kernels is not None else "python"

run_plan = _impl.run_plan
run_plan_complex = _impl.run_plan_complex
det_bareiss = _impl.det_bareiss
det_complex = _impl.det_complex
rref = _impl.rref

__all__ = [
    "BACKEND",
    "compiled_kernels",
    "python_kernels",
    "run_plan",
    "run_plan_complex",
    "det_bareiss",
    "det_complex",
    "rref",
]
