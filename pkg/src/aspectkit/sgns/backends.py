"""Backend selection: compiled inner loop if built, numpy fallback otherwise.

The default can be overridden with ASPECTKIT_SGNS_BACKEND=pure|compiled or
per call via the ``backend`` argument of the trainer.
"""

from __future__ import annotations

import logging
import os

from . import _pure

log = logging.getLogger(__name__)

try:
    from . import _inner
    HAVE_COMPILED = True
except ImportError:
    _inner = None
    HAVE_COMPILED = False
    log.info("compiled sgns core not available; using the pure-numpy fallback")


def resolve_backend(name: str | None = None):
    """Map a backend name ('auto'/None, 'compiled', 'pure') to its module."""
    if name is None or name == "auto":
        name = os.environ.get("ASPECTKIT_SGNS_BACKEND", "").strip() or (
            "compiled" if HAVE_COMPILED else "pure"
        )
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError(
                "the compiled sgns backend was requested but is not built; "
                "reinstall with a C compiler or use backend='pure'"
            )
        return "compiled", _inner
    if name == "pure":
        return "pure", _pure
    raise ValueError(f"unknown sgns backend {name!r}; expected 'auto', 'compiled' or 'pure'")
