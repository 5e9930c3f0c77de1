"""Backend selection for the Jacobi orthogonalization kernel.

The compiled Cython kernel is preferred when importable; the NumPy
implementation is the fallback.  Set ``CSTARPINV_KERNEL=python`` or
``compiled`` to force a backend (``compiled`` raises if the extension is
missing).
"""

import os

from . import jacobi_numpy
from .schedule import rotation_schedule

__all__ = ["orthogonalize_columns", "rotation_schedule", "kernel_name", "get_backend"]

try:
    from . import _jacobi as _compiled
except ImportError:
    _compiled = None

_FORCED = os.environ.get("CSTARPINV_KERNEL", "auto").lower()
if _FORCED == "python":
    _backend, _backend_name = jacobi_numpy, "python"
elif _FORCED == "compiled":
    if _compiled is None:
        raise ImportError(
            "CSTARPINV_KERNEL=compiled but the extension is not built; "
            "run `python setup.py build_ext --inplace` or reinstall"
        )
    _backend, _backend_name = _compiled, "compiled"
elif _compiled is not None:
    _backend, _backend_name = _compiled, "compiled"
else:
    _backend, _backend_name = jacobi_numpy, "python"


def kernel_name():
    """Name of the active backend: ``compiled`` or ``python``."""
    return _backend_name


def get_backend(name=None):
    """Return a backend module by name (``None`` means the active one)."""
    if name is None:
        return _backend
    if name == "python":
        return jacobi_numpy
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernel is not available")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def orthogonalize_columns(a, v, pair_p, pair_q, round_offsets, tol, max_sweeps):
    return _backend.orthogonalize_columns(
        a, v, pair_p, pair_q, round_offsets, tol, max_sweeps
    )
