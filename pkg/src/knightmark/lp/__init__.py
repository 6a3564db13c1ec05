"""Exact rational linear programming."""

from ._kernel import BACKEND, available_backends
from .solver import (
    EQ,
    FREE,
    GE,
    LE,
    NONNEG,
    LinearProgram,
    LpOutcome,
    LpStatus,
    check_outcome,
    dual_program,
    solve,
    solve_many,
)

__all__ = [
    "BACKEND", "available_backends", "EQ", "FREE", "GE", "LE", "NONNEG",
    "LinearProgram", "LpOutcome", "LpStatus", "check_outcome", "dual_program",
    "solve", "solve_many",
]
