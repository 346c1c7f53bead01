"""Pick the compiled kernels when built, else the numpy fallback.

Set ``KICKMAPS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

pykernels = _pykernels

if os.environ.get("KICKMAPS_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels
        BACKEND = "cython"
    except ImportError:  # extension not built
        kernels = _pykernels
        BACKEND = "python"


def available_backends():
    """Mapping of backend name to kernel module, compiled first when present."""
    out = {}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    out["python"] = _pykernels
    return out
