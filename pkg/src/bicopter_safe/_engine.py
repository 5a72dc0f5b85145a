"""Kernel selection: compiled extension when built, pure Python otherwise.

The environment variable BICOPTER_SAFE_ENGINE forces a backend ("compiled" or
"python"); by default the compiled kernel is used whenever the extension
imported successfully.
"""
import os

from . import _kernel_py

try:
    from . import _kernel_c
except ImportError:
    _kernel_c = None

ENV_VAR = "BICOPTER_SAFE_ENGINE"
HAVE_COMPILED = _kernel_c is not None


def available():
    """Backend names usable on this installation."""
    return ("compiled", "python") if HAVE_COMPILED else ("python",)


def get(name=None):
    """Resolve a kernel module by name, env override, or default preference."""
    if name is None:
        name = os.environ.get(ENV_VAR) or None
    if name is None:
        return _kernel_c if HAVE_COMPILED else _kernel_py
    if name == "python":
        return _kernel_py
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError(
                "compiled kernel requested but the _kernel_c extension is not built")
        return _kernel_c
    raise ValueError(f"unknown engine {name!r}; expected 'compiled' or 'python'")


def active_name():
    """Name of the backend get() would return by default."""
    return get().BACKEND
