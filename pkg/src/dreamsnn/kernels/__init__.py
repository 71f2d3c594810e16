"""Hot-kernel backend selection.

The compiled extension is preferred when importable; the pure-numpy module is
a drop-in replacement. Override with DREAMSNN_BACKEND=numpy|cython, or at
runtime with set_backend().
"""

import os

from . import numpy_impl

try:
    from . import _speedups
except ImportError:
    _speedups = None

HAVE_EXT = _speedups is not None

_BACKENDS = {"numpy": numpy_impl}
if HAVE_EXT:
    _BACKENDS["cython"] = _speedups


def available_backends():
    return sorted(_BACKENDS)


def get_backend(name=None):
    """Return the kernel module for `name` (default: env var or fastest)."""
    if name is None:
        name = os.environ.get("DREAMSNN_BACKEND")
    if name is None:
        name = "cython" if HAVE_EXT else "numpy"
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {available_backends()}"
        ) from None


_active = get_backend()


def active_backend():
    return _active


def set_backend(name):
    """Switch the process-wide kernel backend; returns the module."""
    global _active
    _active = get_backend(name)
    return _active
