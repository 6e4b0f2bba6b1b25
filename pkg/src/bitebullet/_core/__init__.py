"""Path-simulation backends.

The compiled Cython kernel is used when it imports; otherwise the numpy
fallback. Set ``BITEBULLET_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None

BACKENDS = {"python": _fallback.simulate_block}
if _kernel is not None:
    BACKENDS["cython"] = _kernel.simulate_block

_forced = os.environ.get("BITEBULLET_BACKEND", "").strip().lower()
if _forced and _forced not in BACKENDS:
    raise ImportError(f"BITEBULLET_BACKEND={_forced!r} is not available; have {sorted(BACKENDS)}")
BACKEND = _forced or ("cython" if "cython" in BACKENDS else "python")


def simulate_block(*args, backend: str | None = None, **kwargs):
    """Dispatch to the selected backend (see ``_kernel.simulate_block``)."""
    return BACKENDS[backend or BACKEND](*args, **kwargs)
