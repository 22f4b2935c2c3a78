"""Kernel selection: the compiled extension when importable, else the pure-Python reference.

Set ``CONGEST_MWC_PURE_PYTHON=1`` to force the reference implementation.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
lex_dijkstra = _kernels_py.lex_dijkstra
lex_dijkstra_sweep = _kernels_py.lex_dijkstra_sweep

if os.environ.get("CONGEST_MWC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    if _compiled is not None:
        BACKEND = "cython"
        lex_dijkstra = _compiled.lex_dijkstra
        lex_dijkstra_sweep = _compiled.lex_dijkstra_sweep


def implementations() -> dict:
    """Every available backend by name (used by equivalence tests and the benchmark)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
