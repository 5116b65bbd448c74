"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set RAILBEAM_BACKEND=python or =compiled to force a choice; "compiled" raises
if the extension is missing.  Both backends implement identical signatures
and the test suite exercises whichever is active (plus the numpy one
explicitly), so numerical behavior is pinned either way.
"""

import os

from . import kernels_py

_FORCE = os.environ.get("RAILBEAM_BACKEND", "auto").lower()

if _FORCE not in ("auto", "python", "compiled"):
    raise RuntimeError(f"RAILBEAM_BACKEND must be auto|python|compiled, got {_FORCE!r}")

_impl = kernels_py
BACKEND = "python"

if _FORCE in ("auto", "compiled"):
    try:
        from . import _kernels as _ext

        _impl = _ext
        BACKEND = "compiled"
    except ImportError:
        if _FORCE == "compiled":
            raise RuntimeError(
                "RAILBEAM_BACKEND=compiled but the railbeam.nn._kernels "
                "extension is not built; reinstall the package or use python"
            )

conv2d_forward = _impl.conv2d_forward
conv2d_backward = _impl.conv2d_backward
maxpool_forward = _impl.maxpool_forward
maxpool_backward = _impl.maxpool_backward
lstm_forward = _impl.lstm_forward
lstm_backward = _impl.lstm_backward


def get_kernels(name: str):
    """Explicit backend module by name ("python" | "compiled")."""
    if name == "python":
        return kernels_py
    if name == "compiled":
        from . import _kernels as ext
        return ext
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    out = ["python"]
    try:
        from . import _kernels  # noqa: F401
        out.append("compiled")
    except ImportError:
        pass
    return out


_KERNEL_NAMES = ("conv2d_forward", "conv2d_backward", "maxpool_forward",
                 "maxpool_backward", "lstm_forward", "lstm_backward")


class use_backend:
    """Context manager that temporarily rebinds the active kernel set.

    Layers look the kernels up through this module at call time, so swapping
    here redirects every model in the process (tests and benchmarks only).
    """

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        impl = get_kernels(self.name)
        self._saved = {n: globals()[n] for n in _KERNEL_NAMES}
        globals().update({n: getattr(impl, n) for n in _KERNEL_NAMES})
        return self

    def __exit__(self, *exc):
        globals().update(self._saved)
        return False
