"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting the environment
variable ``TUBETHETA_PURE_PYTHON=1`` forces the numpy fallback. Both
backends stay importable as :data:`compiled` and :data:`python`.
"""
import os

from . import _kernels_py as python

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("TUBETHETA_PURE_PYTHON", "") in ("", "0"):
    backend = compiled
else:
    backend = python

BACKEND = backend.NAME


def get(name=None):
    """Kernel module by name ("compiled", "python") or the active default."""
    if name is None:
        return backend
    if name == "python":
        return python
    if name == "compiled":
        if compiled is None:
            raise ImportError("the compiled kernel extension is not built")
        return compiled
    raise ValueError(f"unknown kernel backend {name!r}")
