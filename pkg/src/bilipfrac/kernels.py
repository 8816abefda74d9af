"""Backend selection for the hot loops.

The compiled extension is used when it was built and ``BILIPFRAC_PURE`` is
not set to a true value; otherwise the pure-Python module is used.  Both
return identical results.
"""

from __future__ import annotations

import os

from . import _pykernels

_FORCE_PURE = os.environ.get("BILIPFRAC_PURE", "").strip().lower() in ("1", "true", "yes")

_backend = _pykernels
BACKEND = "python"
if not _FORCE_PURE:
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _backend = _compiled
        BACKEND = "cython"

cluster_labels = _backend.cluster_labels
walk_step_tables = _backend.walk_step_tables

COUNT, ESCAPE, OVERLAP, COVER = _pykernels.COUNT, _pykernels.ESCAPE, _pykernels.OVERLAP, _pykernels.COVER
KIND_NAMES = {COUNT: "count", ESCAPE: "escape", OVERLAP: "overlap", COVER: "cover"}


def compiled_available() -> bool:
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True
