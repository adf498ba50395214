"""Kernel backend selection.

The hot loops (full-batch gradient descent and per-step prediction of the
hidden-layer regressor) exist twice: a Cython extension and a numpy
fallback. The compiled backend is preferred when importable; set
``HARMONICA_KERNEL=numpy`` or ``HARMONICA_KERNEL=compiled`` to force one.
"""

import os

from . import mlp_numpy

_requested = os.environ.get("HARMONICA_KERNEL", "").strip().lower()

_backend = None
if _requested in ("", "compiled"):
    try:
        from . import _mlp_cy as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = None
        if _requested == "compiled":
            raise ImportError(
                "HARMONICA_KERNEL=compiled but the extension is not built; "
                "reinstall with a C compiler or unset the variable"
            )
if _backend is None:
    _backend = mlp_numpy

active = _backend
BACKEND_NAME: str = _backend.BACKEND_NAME

gd_train = _backend.gd_train
forward_batch = _backend.forward_batch
forward_one = _backend.forward_one
