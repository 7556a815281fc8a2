"""Episode-loop backend selection.

Two interchangeable implementations of the same loop exist: a compiled
Cython extension (fast) and a pure-Python transliteration (always
available, used as the reference in tests). The default is the compiled
one when the build produced it, with fallback to Python. Selection can be
forced with the CAMOPT_BACKEND environment variable or per call site via
:func:`resolve`.
"""

from __future__ import annotations

import os

from . import _pyloop

try:
    from . import _core

    HAVE_COMPILED = True
except ImportError:
    _core = None
    HAVE_COMPILED = False

BACKENDS = ("cython", "python")


def resolve(name: str | None = None):
    """Return ``(label, run_episode)`` for the requested backend.

    ``name`` may be "cython", "python", or None/"" / "auto" for the
    default (compiled when available, else Python). The CAMOPT_BACKEND
    environment variable supplies the default when ``name`` is not given.
    """
    if name is None or name == "":
        name = os.environ.get("CAMOPT_BACKEND", "auto")
    name = name.strip().lower()
    if name == "auto":
        name = "cython" if HAVE_COMPILED else "python"
    if name == "cython":
        if not HAVE_COMPILED:
            raise RuntimeError(
                "compiled backend requested but the camopt._core extension "
                "is not importable; rebuild the package or use the python "
                "backend"
            )
        return "cython", _core.run_episode
    if name == "python":
        return "python", _pyloop.run_episode
    raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")


DEFAULT_BACKEND, run_episode = resolve()
