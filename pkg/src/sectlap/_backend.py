"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python twin
is the fallback. ``SECTLAP_BACKEND=python`` or ``SECTLAP_BACKEND=compiled``
forces the choice (the latter raises if the extension is missing).
"""
import os

_choice = os.environ.get("SECTLAP_BACKEND", "").strip().lower()

if _choice == "python":
    from . import _kernels_py as kernels
elif _choice == "compiled":
    from . import _kernels as kernels  # type: ignore[no-redef]
elif _choice == "":
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]
else:
    raise ImportError(f"SECTLAP_BACKEND={_choice!r}: expected 'python' or 'compiled'")


def backend_name() -> str:
    """Name of the active quadrature kernel ('compiled' or 'python')."""
    return kernels.BACKEND
