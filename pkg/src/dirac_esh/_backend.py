"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set ``DIRAC_ESH_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and by the backend-equivalence tests).
"""
import logging
import os

from . import _kernels_py

logger = logging.getLogger(__name__)

_compiled = None
if not os.environ.get("DIRAC_ESH_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        logger.debug("compiled kernels unavailable, using pure-Python fallback")
        _compiled = None

kernels = _compiled if _compiled is not None else _kernels_py
BACKEND = "compiled" if _compiled is not None else "python"


def available_backends():
    """Mapping of backend name to kernel module, compiled first when built."""
    out = {}
    if _compiled is not None:
        out["compiled"] = _compiled
    out["python"] = _kernels_py
    return out
