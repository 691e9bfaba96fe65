"""Kernel dispatch: the compiled extension when built, numpy otherwise.

Set ``SCATTER_TOPO_PURE_PYTHON=1`` to force the fallback.
"""
import os

BACKEND = "python"

if os.environ.get("SCATTER_TOPO_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import (symmetric_support_index, window_energies,  # noqa: F401
                              window_max_abs_diff)
else:
    try:
        from ._kernels import (symmetric_support_index, window_energies,  # noqa: F401
                               window_max_abs_diff)
        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import (symmetric_support_index, window_energies,  # noqa: F401
                                  window_max_abs_diff)
