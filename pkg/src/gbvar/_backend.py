"""Kernel backend selection.

The compiled extension gbvar._kernels is preferred when importable; the
numpy module gbvar._kernels_py is the fallback. GBVAR_BACKEND forces the
choice: "c" (aliases "cython", "compiled") or "python" (aliases "numpy",
"py"). Forcing "c" without the extension built raises at import.
"""

import os

_C_NAMES = ("c", "cython", "compiled")
_PY_NAMES = ("python", "numpy", "py")


def load_backend(name: str):
    """Return the kernel module for an explicit backend name."""
    if name in _C_NAMES:
        from . import _kernels
        return _kernels
    if name in _PY_NAMES:
        from . import _kernels_py
        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


def _select():
    choice = os.environ.get("GBVAR_BACKEND", "auto").strip().lower()
    if choice and choice != "auto":
        return load_backend(choice)
    try:
        from . import _kernels
        return _kernels
    except ImportError:
        from . import _kernels_py
        return _kernels_py


_impl = _select()

BACKEND = _impl.BACKEND_NAME
simulate_chain = _impl.simulate_chain
lasso_cd_multi = _impl.lasso_cd_multi


def backend_name() -> str:
    """Name of the active kernel backend: "c" or "python"."""
    return BACKEND
