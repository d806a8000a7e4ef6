"""Select the row-reduction kernels at import.

The compiled module is used when it was built; ``REGMAT_BACKEND=python``
forces the numpy fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback


def _load_compiled() -> ModuleType | None:
    try:
        from . import _core
    except ImportError:
        return None
    return _core


_compiled = _load_compiled()

if os.environ.get("REGMAT_BACKEND", "").lower() == "python" or _compiled is None:
    kernels: ModuleType = _fallback
    BACKEND = "python"
else:
    kernels = _compiled
    BACKEND = "cython"


def available_backends() -> dict[str, ModuleType]:
    found = {"python": _fallback}
    if _compiled is not None:
        found["cython"] = _compiled
    return found
