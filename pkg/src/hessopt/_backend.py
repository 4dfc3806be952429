"""Simulation-backend selection.

The hot per-step loop exists twice: a compiled Cython kernel
(hessopt._fastcore) and a pure-Python/NumPy twin (hessopt._core_py) with
identical semantics. The compiled kernel is preferred when importable; the
environment variable HESS_OPT_BACKEND forces a choice:

    HESS_OPT_BACKEND=compiled   require the extension (ImportError if absent)
    HESS_OPT_BACKEND=python     force the pure-Python twin
    HESS_OPT_BACKEND=auto       default behavior
"""

from __future__ import annotations

import os

from .errors import ConfigError


def load_backend():
    """Return (module, name) for the selected backend."""
    choice = os.environ.get("HESS_OPT_BACKEND", "auto").lower()
    if choice not in ("auto", "compiled", "python"):
        raise ConfigError(
            f"HESS_OPT_BACKEND must be auto, compiled or python, got {choice!r}"
        )
    if choice in ("auto", "compiled"):
        try:
            from . import _fastcore

            return _fastcore, "compiled"
        except ImportError:
            if choice == "compiled":
                raise
    from . import _core_py

    return _core_py, "python"


_module, backend_name = load_backend()


def simulate_arrays(sys, p_em, p_shaft):
    return _module.simulate_arrays(sys, p_em, p_shaft)
