"""Select the kernel implementation at import time.

The compiled ``_kernels`` extension is used when it is importable;
otherwise, or when ``QWMARKOV_PURE_PYTHON`` is set to a non-empty value,
the numpy fallback is used.
"""

import importlib
import os

from . import _fallback


def _load_compiled():
    try:
        return importlib.import_module("qwmarkov._kernels")
    except ImportError:
        return None


_compiled = _load_compiled()

if _compiled is not None and not os.environ.get("QWMARKOV_PURE_PYTHON"):
    kernels = _compiled
else:
    kernels = _fallback

NAME = kernels.NAME


def available():
    """Names of the kernel backends that can be loaded in this process."""
    names = ["python"]
    if _compiled is not None:
        names.append("cython")
    return names


def get(name):
    """Return the kernel module called ``name`` (``"python"`` or ``"cython"``)."""
    if name == "python":
        return _fallback
    if name == "cython" and _compiled is not None:
        return _compiled
    raise ValueError(f"kernel backend {name!r} is not available")
