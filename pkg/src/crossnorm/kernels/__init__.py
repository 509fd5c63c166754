"""Hot-kernel backend selection.

Prefers the compiled LAPACK loop when it was built; falls back to the
NumPy implementation otherwise.  Set CROSSNORM_PURE_PYTHON=1 to force
the fallback (used by the kernel benchmark and for debugging).
"""

import os

if os.environ.get("CROSSNORM_PURE_PYTHON"):
    from . import _batched_py as _impl
else:
    try:
        from . import _batched as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _batched_py as _impl

BACKEND = _impl.BACKEND
nuclear_norms = _impl.nuclear_norms
pair_cost = _impl.pair_cost

__all__ = ["BACKEND", "nuclear_norms", "pair_cost"]
