"""Fidelity kernel backend selection.

The compiled Cython backend is preferred when its extension module built;
otherwise the pure-numpy fallback is used. Set QRAMSIM_KERNELS=pure or
=compiled to force a backend (forcing `compiled` raises if unavailable).
"""

from __future__ import annotations

import os

_requested = os.environ.get("QRAMSIM_KERNELS", "").strip().lower()

if _requested == "pure":
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _pure as _impl  # type: ignore[no-redef]

        BACKEND = "pure"

bb_set_fidelities = _impl.bb_set_fidelities
fanout_set_fidelities = _impl.fanout_set_fidelities

__all__ = ["BACKEND", "bb_set_fidelities", "fanout_set_fidelities"]
