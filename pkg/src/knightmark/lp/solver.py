"""Exact two-phase simplex with Bland's rule over rationals.

Problems are stated with free/bounded variables and mixed row senses, reduced
to ``A z = b, z >= 0`` and scaled row-wise to integers for the fraction-free
kernel.  Every optimum comes with row duals and reduced costs that
:func:`check_outcome` verifies independently of the solver.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import DimensionMismatch
from ..rational import integer_row, to_fraction
from . import _kernel

LE, GE, EQ = "<=", ">=", "="
_FLIP = {LE: GE, GE: LE, EQ: EQ}


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


Bound = tuple[Optional[Fraction], Optional[Fraction]]
NONNEG: Bound = (Fraction(0), None)
FREE: Bound = (None, None)


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    rows: tuple = ()
    senses: tuple = ()
    rhs: tuple = ()
    bounds: tuple = ()
    sense: str = "min"

    @classmethod
    def build(cls, objective, rows=(), senses=(), rhs=(), bounds=None, sense="min"):
        c = tuple(to_fraction(v) for v in objective)
        n = len(c)
        a = tuple(tuple(to_fraction(v) for v in r) for r in rows)
        for i, r in enumerate(a):
            if len(r) != n:
                raise DimensionMismatch(f"row {i} has {len(r)} entries, expected {n}")
        s = tuple(senses)
        if len(s) != len(a):
            raise DimensionMismatch(f"{len(s)} senses for {len(a)} rows")
        for x in s:
            if x not in (LE, GE, EQ):
                raise DimensionMismatch(f"unknown row sense {x!r}")
        b = tuple(to_fraction(v) for v in rhs)
        if len(b) != len(a):
            raise DimensionMismatch(f"{len(b)} right-hand sides for {len(a)} rows")
        if bounds is None:
            bd = (NONNEG,) * n
        else:
            bd = tuple(
                (None if lo is None else to_fraction(lo), None if hi is None else to_fraction(hi))
                for lo, hi in bounds
            )
            if len(bd) != n:
                raise DimensionMismatch(f"{len(bd)} bounds for {n} variables")
        if sense not in ("min", "max"):
            raise DimensionMismatch(f"unknown objective sense {sense!r}")
        return cls(c, a, s, b, bd, sense)

    @property
    def n_vars(self):
        return len(self.objective)


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    objective: Optional[Fraction] = None
    x: Optional[tuple] = None
    y: Optional[tuple] = None
    reduced: Optional[tuple] = None
    ray: Optional[tuple] = None
    pivots: int = 0
    backend: str = field(default="", compare=False)

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def _var_map(bounds):
    """Columns of the nonnegative standard form for each original variable."""
    mapping = []
    extra_rows = []
    col = 0
    for j, (lo, hi) in enumerate(bounds):
        if lo is not None:
            mapping.append(("lo", col, lo))
            if hi is not None:
                extra_rows.append((j, col, hi - lo))
            col += 1
        elif hi is not None:
            mapping.append(("hi", col, hi))
            col += 1
        else:
            mapping.append(("free", col, Fraction(0)))
            col += 2
    return mapping, extra_rows, col


def _expand(coeffs, mapping, nz):
    out = [Fraction(0)] * nz
    const = Fraction(0)
    for a, (kind, col, off) in zip(coeffs, mapping):
        if a == 0:
            continue
        if kind == "lo":
            out[col] += a
            const += a * off
        elif kind == "hi":
            out[col] -= a
            const += a * off
        else:
            out[col] += a
            out[col + 1] -= a
    return out, const


def _recover(z, mapping):
    x = []
    for kind, col, off in mapping:
        if kind == "lo":
            x.append(off + z[col])
        elif kind == "hi":
            x.append(off - z[col])
        else:
            x.append(z[col] - z[col + 1])
    return tuple(x)


def _recover_direction(dz, mapping):
    x = []
    for kind, col, _ in mapping:
        if kind == "lo":
            x.append(dz[col])
        elif kind == "hi":
            x.append(-dz[col])
        else:
            x.append(dz[col] - dz[col + 1])
    return tuple(x)


def solve(lp: LinearProgram, tableau_cls=None, max_pivots: int = 200000) -> LpOutcome:
    """Solve ``lp`` exactly.  Deterministic: a fixed pivot rule and input order."""
    Tableau = tableau_cls or _kernel.Tableau
    mapping, bound_rows, nz = _var_map(lp.bounds)
    minimize = lp.sense == "min"
    c_min = lp.objective if minimize else tuple(-v for v in lp.objective)

    # internal rows: (coefficients over z, sense, rhs)
    internal = []
    for a, s, b in zip(lp.rows, lp.senses, lp.rhs):
        coeffs, const = _expand(a, mapping, nz)
        internal.append((coeffs, s, b - const))
    for _, col, width in bound_rows:
        coeffs = [Fraction(0)] * nz
        coeffs[col] = Fraction(1)
        internal.append((coeffs, LE, width))

    m = len(internal)
    sigma = []
    norm_rows = []
    for coeffs, s, b in internal:
        if b < 0:
            sigma.append(-1)
            norm_rows.append(([-v for v in coeffs], _FLIP[s], -b))
        else:
            sigma.append(1)
            norm_rows.append((coeffs, s, b))

    n_slack = sum(1 for _, s, _ in norm_rows if s != EQ)
    n_art = sum(1 for _, s, _ in norm_rows if s != LE)
    slack0 = nz
    art0 = nz + n_slack
    width = nz + n_slack + n_art  # excluding rhs
    rows = []
    basis = []
    scale = []
    init_col = []
    art_rows = []
    si = ai = 0
    for k, (coeffs, s, b) in enumerate(norm_rows):
        ints, mult = integer_row(list(coeffs) + [b])
        scale.append(mult)
        row = ints[:nz] + [0] * (n_slack + n_art) + [ints[nz]]
        if s == LE:
            row[slack0 + si] = 1
            basis.append(slack0 + si)
            init_col.append(slack0 + si)
            si += 1
        else:
            if s == GE:
                row[slack0 + si] = -1
                si += 1
            row[art0 + ai] = 1
            basis.append(art0 + ai)
            init_col.append(art0 + ai)
            art_rows.append(k)
            ai += 1
        rows.append(row)

    cz, c_const = _expand(c_min, mapping, nz)
    obj_int, obj_scale = integer_row(cz) if nz else ([], 1)
    rows.append(list(obj_int) + [0] * (n_slack + n_art) + [0])
    phase1 = [0] * (width + 1)
    for k in art_rows:
        for j in range(art0):
            phase1[j] -= rows[k][j]
        phase1[width] -= rows[k][width]
    rows.append(phase1)

    if width == 0:
        # no columns at all: feasible iff every rhs is zero
        feasible = all(b == 0 for _, _, b in norm_rows)
        if not feasible:
            return LpOutcome(LpStatus.INFEASIBLE, backend=Tableau.backend)
        return LpOutcome(LpStatus.OPTIMAL, objective=Fraction(0), x=(), y=tuple(Fraction(0) for _ in lp.rows),
                         reduced=(), backend=Tableau.backend)

    tab = Tableau(rows, basis, m)
    zrow, p1row = m, m + 1
    last = width
    if art_rows:
        tab.run(p1row, [True] * width, max_pivots)
        if tab.get(p1row, last) != 0:
            return LpOutcome(LpStatus.INFEASIBLE, pivots=tab.pivots, backend=Tableau.backend)
        for i in range(m):
            if tab.basis[i] >= art0:
                for j in range(art0):
                    if tab.get(i, j) != 0:
                        tab.pivot(i, j)
                        break
    allowed = [True] * art0 + [False] * n_art
    status, entering = tab.run(zrow, allowed, max_pivots)
    if status == _kernel.ITERATION_LIMIT:
        raise RuntimeError("simplex iteration limit reached")

    det = tab.det
    rhs = tab.column(last)
    bas = tab.basis
    z = [Fraction(0)] * width
    for i in range(m):
        z[bas[i]] = Fraction(rhs[i], det)
    x = _recover(z, mapping)

    if status == _kernel.UNBOUNDED:
        col = tab.column(entering)
        dz = [Fraction(0)] * width
        dz[entering] = Fraction(1)
        for i in range(m):
            dz[bas[i]] = Fraction(-col[i], det)
        ray = _recover_direction(dz, mapping)
        return LpOutcome(LpStatus.UNBOUNDED, x=x, ray=ray, pivots=tab.pivots, backend=Tableau.backend)

    zr = tab.row(zrow)
    n_orig = len(lp.rows)
    y_min = []
    for k in range(n_orig):
        y_scaled = Fraction(-zr[init_col[k]], obj_scale * det)
        y_min.append(y_scaled * scale[k] * sigma[k])
    y = tuple(y_min) if minimize else tuple(-v for v in y_min)
    reduced = tuple(
        lp.objective[j] - sum((lp.rows[i][j] * y[i] for i in range(n_orig)), Fraction(0))
        for j in range(lp.n_vars)
    )
    value = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
    return LpOutcome(LpStatus.OPTIMAL, objective=value, x=x, y=y, reduced=reduced,
                     pivots=tab.pivots, backend=Tableau.backend)


def solve_many(lps: Sequence[LinearProgram], workers: int = 1) -> list[LpOutcome]:
    """Solve independent programs; results keep input order for any ``workers``."""
    if workers <= 1 or len(lps) <= 1:
        return [solve(lp) for lp in lps]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(solve, lps))


def _row_value(row, x):
    return sum((a * v for a, v in zip(row, x)), Fraction(0))


def check_outcome(lp: LinearProgram, out: LpOutcome) -> list[str]:
    """Independent certificate check; returns a list of violations (empty = valid)."""
    problems = []
    if out.status is LpStatus.INFEASIBLE:
        return problems
    x = out.x
    if x is None or len(x) != lp.n_vars:
        return ["missing primal point"]
    for i, (row, s, b) in enumerate(zip(lp.rows, lp.senses, lp.rhs)):
        v = _row_value(row, x)
        if (s == LE and v > b) or (s == GE and v < b) or (s == EQ and v != b):
            problems.append(f"row {i} violated: {v} {s} {b}")
    for j, ((lo, hi), v) in enumerate(zip(lp.bounds, x)):
        if (lo is not None and v < lo) or (hi is not None and v > hi):
            problems.append(f"bound {j} violated: {v} not in [{lo}, {hi}]")

    sgn = 1 if lp.sense == "min" else -1
    if out.status is LpStatus.UNBOUNDED:
        r = out.ray
        if r is None or len(r) != lp.n_vars:
            return problems + ["missing ray"]
        for i, (row, s) in enumerate(zip(lp.rows, lp.senses)):
            v = _row_value(row, r)
            if (s == LE and v > 0) or (s == GE and v < 0) or (s == EQ and v != 0):
                problems.append(f"ray leaves row {i}")
        for j, ((lo, hi), v) in enumerate(zip(lp.bounds, r)):
            if (lo is not None and v < 0) or (hi is not None and v > 0):
                problems.append(f"ray leaves bound {j}")
        if sgn * _row_value(lp.objective, r) >= 0:
            problems.append("ray does not improve the objective")
        return problems

    y = out.y
    if y is None or len(y) != len(lp.rows):
        return problems + ["missing dual"]
    c = [sgn * v for v in lp.objective]
    ym = [sgn * v for v in y]
    for i, (s, v) in enumerate(zip(lp.senses, ym)):
        if (s == GE and v < 0) or (s == LE and v > 0):
            problems.append(f"dual {i} has wrong sign for {s}")
    dual_value = sum((b * v for b, v in zip(lp.rhs, ym)), Fraction(0))
    for j in range(lp.n_vars):
        d = c[j] - sum((lp.rows[i][j] * ym[i] for i in range(len(lp.rows))), Fraction(0))
        lo, hi = lp.bounds[j]
        if d > 0:
            if lo is None or x[j] != lo:
                problems.append(f"reduced cost {j} positive off lower bound")
            else:
                dual_value += lo * d
        elif d < 0:
            if hi is None or x[j] != hi:
                problems.append(f"reduced cost {j} negative off upper bound")
            else:
                dual_value += hi * d
    for i, (row, b, v) in enumerate(zip(lp.rows, lp.rhs, ym)):
        if v != 0 and _row_value(row, x) != b:
            problems.append(f"complementary slackness fails on row {i}")
    primal_value = _row_value(c, x)
    if dual_value != primal_value:
        problems.append(f"duality gap {primal_value} vs {dual_value}")
    if out.objective is not None and out.objective != sgn * primal_value:
        problems.append("reported objective does not match the primal point")
    return problems


def dual_program(lp: LinearProgram) -> LinearProgram:
    """The LP dual of a program whose variables are all free or nonnegative.

    Used by the test-suite to confirm strong duality by a second solve.
    """
    for lo, hi in lp.bounds:
        if hi is not None or (lo is not None and lo != 0):
            raise ValueError("dual_program supports only free and nonnegative variables")
    sgn = 1 if lp.sense == "min" else -1
    c = [sgn * v for v in lp.objective]
    m = len(lp.rows)
    # min c.x s.t. rows  ->  max b.y, y sign by row sense, A^T y (<= c | = c)
    rows = []
    senses = []
    rhs = []
    for j, (lo, _) in enumerate(lp.bounds):
        rows.append([lp.rows[i][j] for i in range(m)])
        senses.append(LE if lo is not None else EQ)
        rhs.append(c[j])
    bounds = []
    for s in lp.senses:
        bounds.append(NONNEG if s == GE else (None, Fraction(0)) if s == LE else FREE)
    return LinearProgram.build([b for b in lp.rhs], rows, senses, rhs, bounds, sense="max")


__all__ = [
    "LE", "GE", "EQ", "FREE", "NONNEG", "LinearProgram", "LpOutcome", "LpStatus",
    "solve", "solve_many", "check_outcome", "dual_program",
]
