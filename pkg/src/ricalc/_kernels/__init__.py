"""Line kernels: compiled extension when available, NumPy otherwise.

Set ``RICALC_PURE=1`` to force the NumPy path.
"""

from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
if os.environ.get("RICALC_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

maxavg_eval = _impl.maxavg_eval
hilbert_eval = _impl.hilbert_eval
riesz_eval = _impl.riesz_eval

__all__ = ["BACKEND", "maxavg_eval", "hilbert_eval", "riesz_eval", "_fallback"]
