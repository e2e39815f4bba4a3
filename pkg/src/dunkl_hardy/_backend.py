"""Select the kernel core at import time.

``DUNKL_BACKEND`` may be ``auto`` (default: compiled if importable),
``compiled`` (fail loudly if the extension is missing) or ``python``.
"""

import importlib
import os

BACKENDS = ("compiled", "python")


def load_backend(name):
    """Return the core module for ``name`` (``compiled`` or ``python``)."""
    if name == "compiled":
        return importlib.import_module("dunkl_hardy._ccore")
    if name == "python":
        return importlib.import_module("dunkl_hardy._pycore")
    raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")


def available_backends():
    found = []
    for name in BACKENDS:
        try:
            load_backend(name)
        except ImportError:
            continue
        found.append(name)
    return found


def _select():
    choice = os.environ.get("DUNKL_BACKEND", "auto").strip().lower()
    if choice == "python":
        return "python", load_backend("python")
    if choice == "compiled":
        return "compiled", load_backend("compiled")
    if choice not in ("", "auto"):
        raise ValueError(f"DUNKL_BACKEND={choice!r} is not one of auto, compiled, python")
    try:
        return "compiled", load_backend("compiled")
    except ImportError:
        return "python", load_backend("python")


BACKEND, core = _select()
