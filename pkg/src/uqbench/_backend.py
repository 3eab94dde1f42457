"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set ``UQBENCH_PURE=1`` to force the pure-python backend.
"""

import os

if os.environ.get("UQBENCH_PURE", "0") not in ("", "0"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

midranks = _impl.midranks
grid_expected_errors = _impl.grid_expected_errors
