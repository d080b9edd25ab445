"""Selects the compiled flow kernel when available.

Set ``DIRACFLOW_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _flowkernel_py

try:
    if os.environ.get("DIRACFLOW_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from . import _flowkernel as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
rk4_steps = _compiled.rk4_steps if _compiled is not None else _flowkernel_py.rk4_steps
rk4_steps_python = _flowkernel_py.rk4_steps
rk4_steps_compiled = _compiled.rk4_steps if _compiled is not None else None

__all__ = ["BACKEND", "rk4_steps", "rk4_steps_python", "rk4_steps_compiled"]
