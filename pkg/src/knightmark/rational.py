"""Exact rational parsing, formatting and small dense linear algebra."""

from __future__ import annotations

import re
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import RationalParseError

Vector = tuple  # tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(\s*/\s*[+-]?\d+)?\s*$")


def to_fraction(value) -> Fraction:
    """Convert an int, Fraction, decimal string or ``"p/q"`` string exactly.

    Floats are rejected: a binary float is almost never the number the user
    meant, and the whole point of the library is exactness.
    """
    if isinstance(value, bool):
        raise RationalParseError(f"boolean is not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise RationalParseError(f"refusing inexact float {value!r}; pass a string")
    if isinstance(value, str):
        if not _RATIONAL_RE.match(value):
            raise RationalParseError(f"not a rational number: {value!r}")
        text = value.replace(" ", "")
        if "/" in text:
            num, den = text.split("/")
            if int(den) == 0:
                raise RationalParseError(f"zero denominator in {value!r}")
            return Fraction(num) / Fraction(den)
        return Fraction(text)
    # numbers.Rational such as gmpy2.mpq
    try:
        return Fraction(value.numerator, value.denominator)
    except AttributeError:
        raise RationalParseError(f"not a rational number: {value!r}") from None


def vec(values: Iterable) -> Vector:
    return tuple(to_fraction(v) for v in values)


def fmt(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def fmt_vec(v: Sequence[Fraction]) -> list[str]:
    return [fmt(x) for x in v]


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a, b) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a) -> Vector:
    return tuple(c * x for x in a)


def zeros(n: int) -> Vector:
    return (Fraction(0),) * n


def unit(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if k == i else 0) for k in range(n))


def integer_row(values: Sequence[Fraction]) -> tuple[list[int], int]:
    """Scale a rational row to integers; returns (row, positive multiplier)."""
    m = 1
    for v in values:
        m = lcm(m, Fraction(v).denominator)
    return [int(Fraction(v) * m) for v in values], m


def rref(matrix: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    rows = [[Fraction(x) for x in r] for r in matrix]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix) -> int:
    return len(rref(matrix)[1])


def nullspace(matrix: Sequence[Sequence[Fraction]], ncols: int | None = None) -> list[Vector]:
    """Basis of {x : matrix @ x = 0}; ``ncols`` is needed for an empty matrix."""
    if not matrix:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [unit(ncols, i) for i in range(ncols)]
    ncols = len(matrix[0])
    reduced, pivots = rref(matrix)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, p in enumerate(pivots):
            x[p] = -reduced[r][f]
        basis.append(tuple(x))
    return basis


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vector | None:
    """One exact solution of matrix @ x = rhs (free variables set to 0), or None."""
    if not matrix:
        return None
    ncols = len(matrix[0])
    aug = [list(r) + [Fraction(b)] for r, b in zip(matrix, rhs)]
    reduced, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, p in enumerate(pivots):
        x[p] = reduced[r][ncols]
    return tuple(x)


def same_span(a: Sequence[Vector], b: Sequence[Vector]) -> bool:
    ra, rb = rank(a) if a else 0, rank(b) if b else 0
    if ra != rb:
        return False
    both = list(a) + list(b)
    return (rank(both) if both else 0) == ra
