"""Select the tableau kernel at import time.

The GMP extension is preferred; ``KNIGHTMARK_PURE=1`` forces the pure-Python
kernel (used by the test-suite to run both).
"""

import os

from . import _tableau_py

PURE_TABLEAU = _tableau_py.Tableau

try:
    from ._tableau import Tableau as _CompiledTableau
except ImportError:  # extension not built
    _CompiledTableau = None

COMPILED_TABLEAU = _CompiledTableau

if COMPILED_TABLEAU is not None and not os.environ.get("KNIGHTMARK_PURE"):
    Tableau = COMPILED_TABLEAU
else:
    Tableau = PURE_TABLEAU

OPTIMAL = _tableau_py.OPTIMAL
UNBOUNDED = _tableau_py.UNBOUNDED
ITERATION_LIMIT = _tableau_py.ITERATION_LIMIT

BACKEND = Tableau.backend


def available_backends():
    out = {"python": PURE_TABLEAU}
    if COMPILED_TABLEAU is not None:
        out["gmp"] = COMPILED_TABLEAU
    return out
