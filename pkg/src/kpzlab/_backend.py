"""Kernel selection at import.

The compiled extension is used when it was built; otherwise the numpy
fallback is loaded. ``KPZLAB_BACKEND=python`` forces the fallback.
"""

import importlib
import os

BACKEND = "python"
kernels = None

if os.environ.get("KPZLAB_BACKEND", "").lower() not in ("python", "fallback"):
    try:
        kernels = importlib.import_module("kpzlab._kernels")
        BACKEND = "compiled"
    except ImportError:
        kernels = None

if kernels is None:
    from . import _fallback as kernels  # noqa: F811


def load(name: str):
    """Return the kernel module for ``name`` in {"compiled", "python"}."""
    if name == "compiled":
        return importlib.import_module("kpzlab._kernels")
    if name == "python":
        return importlib.import_module("kpzlab._fallback")
    raise ValueError(f"unknown backend {name!r}")
