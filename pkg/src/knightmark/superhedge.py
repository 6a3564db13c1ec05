"""Super-replication price, the martingale polytope and the viability check.

The polytope of absolutely continuous martingale functionals is held in
test-row coordinates: ``lam >= 0`` with ``q = L^T lam``.  For state-based
orders the rows are Diracs, so ``lam`` is ``q`` restricted to non-polar states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import DiagnosticLimit, EmptyPolytope, UnboundedBelow
from .lp import EQ, FREE, GE, LE, NONNEG, LinearProgram, solve, solve_many
from .market import ValidatedMarket
from .order import EXPECTATION, OrderStructure, RelevanceSpec
from .rational import dot, rank, solve as linsolve, to_fraction, unit

VERTEX_STATE_CAP = 12
VERTEX_SUBSET_CAP = 1 << 18


class MartingalePolytope:
    """H-representation of the normalized, order-positive martingale functionals.

    ``allowed`` restricts which test rows may carry mass; for state-based
    orders this is how "measures supported in A" is expressed.
    """

    def __init__(self, market: ValidatedMarket, order: OrderStructure,
                 allowed: Optional[Iterable[int]] = None, generators=None):
        self.market = market
        self.order = order
        k = order.rows
        self.allowed = tuple(range(k)) if allowed is None else tuple(sorted(set(allowed)))
        gens = market.generators if generators is None else generators
        self.linear = market.linear
        self._images = [order.apply(g.payoff) for g in gens]
        self._images = [img for img in self._images if any(img)]
        self._mass = order.row_mass()

    @classmethod
    def on_states(cls, market, order, states):
        """Restrict to functionals living on ``states`` (rows supported inside the set)."""
        states = set(states)
        rows = [k for k, r in enumerate(order.test_matrix)
                if all(w in states for w in range(order.n) if r[w] != 0)]
        return cls(market, order, rows)

    # -- LP plumbing -------------------------------------------------------
    def constraints(self):
        idx = self.allowed
        rows = [[self._mass[k] for k in idx]]
        senses = [EQ]
        rhs = [Fraction(1)]
        for img in self._images:
            rows.append([img[k] for k in idx])
            senses.append(EQ if self.linear else LE)
            rhs.append(Fraction(0))
        return rows, senses, rhs

    def program(self, lam_objective, sense="max") -> LinearProgram:
        rows, senses, rhs = self.constraints()
        c = [lam_objective[k] for k in self.allowed]
        return LinearProgram.build(c, rows, senses, rhs, [NONNEG] * len(self.allowed), sense)

    def _lift(self, x) -> tuple:
        lam = [Fraction(0)] * self.order.rows
        for k, v in zip(self.allowed, x):
            lam[k] = v
        return tuple(lam)

    def _objective_for(self, payoff) -> tuple:
        return self.order.apply(payoff)

    # -- queries -----------------------------------------------------------
    def feasible_point(self) -> Optional[tuple]:
        """Some element ``q`` of the polytope, or None when it is empty."""
        if not self.allowed:
            return None
        out = solve(self.program([Fraction(0)] * self.order.rows))
        if not out.optimal:
            return None
        return self.order.functional(self._lift(out.x))

    def is_empty(self) -> bool:
        return self.feasible_point() is None

    def maximize_target(self, target):
        """``max lam . target``; returns (value, lam) or None if the polytope is empty."""
        if not self.allowed:
            return None
        out = solve(self.program(target))
        if not out.optimal:
            return None
        return out.objective, self._lift(out.x)

    def support(self, payoff):
        """Support function ``max q . X``; returns (value, q) or None when empty."""
        res = self.maximize_target(self._objective_for(payoff))
        if res is None:
            return None
        return res[0], self.order.functional(res[1])

    def minimize(self, payoff):
        res = self.maximize_target(tuple(-v for v in self._objective_for(payoff)))
        if res is None:
            return None
        return -res[0], self.order.functional(res[1])

    def charge(self, state: int):
        """Largest mass any polytope element puts on ``state``."""
        return self.support(unit(self.order.n, state))

    def charges(self, states, workers: int = 1) -> dict:
        """``{state: (value, q) or None}`` computed as independent LPs."""
        states = list(states)
        if not self.allowed:
            return {w: None for w in states}
        lps = [self.program(self.order.apply(unit(self.order.n, w))) for w in states]
        outs = solve_many(lps, workers)
        res = {}
        for w, out in zip(states, outs):
            res[w] = (out.objective, self.order.functional(self._lift(out.x))) if out.optimal else None
        return res

    def contains(self, q) -> bool:
        """Exact membership test for a state vector ``q``."""
        q = tuple(to_fraction(v) for v in q)
        n = self.order.n
        if len(q) != n or any(v < 0 for v in q) or sum(q) != 1:
            return False
        for g in (self.market.generators):
            v = dot(q, g.payoff)
            if (self.linear and v != 0) or (not self.linear and v > 0):
                return False
        # q must be L^T lam with lam >= 0 on allowed rows
        rows = [[self.order.test_matrix[k][w] for k in self.allowed] for w in range(n)]
        if not self.allowed:
            return False
        lp = LinearProgram.build([0] * len(self.allowed), rows, [EQ] * n, q,
                                 [NONNEG] * len(self.allowed))
        return solve(lp).optimal

    def is_singleton(self) -> Optional[tuple]:
        """The unique element if the polytope is a single point, else None."""
        point = self.feasible_point()
        if point is None:
            return None
        for w in range(self.order.n):
            hi = self.support(unit(self.order.n, w))
            lo = self.minimize(unit(self.order.n, w))
            if hi[0] != lo[0]:
                return None
        return point

    def vertices(self) -> list:
        """Extreme points as state vectors, sorted.  Diagnostic only (N <= 12).

        Basic feasible solutions are enumerated by support: a vertex of
        ``{lam >= 0, A lam = b}`` is the unique solution on a set of linearly
        independent columns.  Cone-mode inequalities get slack columns.
        """
        if self.order.n > VERTEX_STATE_CAP:
            raise DiagnosticLimit(f"vertex enumeration is capped at {VERTEX_STATE_CAP} states")
        rows, senses, rhs = self.constraints()
        k = len(self.allowed)
        cols = []
        for j in range(k):
            cols.append([r[j] for r in rows])
        for i, s in enumerate(senses):
            if s == LE:
                cols.append([Fraction(1) if r == i else Fraction(0) for r in range(len(rows))])
        r_full = rank([list(c) for c in zip(*cols)]) if cols else 0
        m = len(rows)
        found = set()
        budget = [0]

        def extend(chosen, start):
            budget[0] += 1
            if budget[0] > VERTEX_SUBSET_CAP:
                raise DiagnosticLimit("vertex enumeration exceeded its subset budget")
            if chosen:
                mat = [[cols[j][i] for j in chosen] for i in range(m)]
                sol = linsolve(mat, rhs)
                if sol is not None and all(v > 0 for v in sol):
                    lam = [Fraction(0)] * k
                    for j, v in zip(chosen, sol):
                        if j < k:
                            lam[j] = v
                    found.add(self.order.functional(self._lift(lam)))
            if len(chosen) == r_full:
                return
            for j in range(start, len(cols)):
                trial = chosen + [j]
                mat = [[cols[c][i] for c in trial] for i in range(m)]
                if rank(mat) == len(trial):
                    extend(trial, j + 1)

        extend([], 0)
        pts = sorted(found)
        if self.order.kind == EXPECTATION and len(pts) > 2:
            pts = [p for p in pts if not _in_hull(p, [x for x in pts if x != p])]
        return pts


def _in_hull(p, others) -> bool:
    if not others:
        return False
    n = len(p)
    rows = [[o[w] for o in others] for w in range(n)] + [[Fraction(1)] * len(others)]
    lp = LinearProgram.build([0] * len(others), rows, [EQ] * (n + 1), list(p) + [1],
                             [NONNEG] * len(others))
    return solve(lp).optimal


def martingale_polytope(market: ValidatedMarket, order: OrderStructure) -> MartingalePolytope:
    return MartingalePolytope(market, order)


@dataclass(frozen=True)
class HedgeCertificate:
    price: Fraction
    strategy: tuple  # coefficient per net-trade generator
    gain: tuple  # terminal payoff of the strategy
    residual: Optional[tuple]  # min(price + gain - X, 0); None for expectation orders
    dual: tuple  # a maximizing element of the polytope (state vector)
    payoff: tuple = field(default=())

    def verify(self, market: ValidatedMarket, order: OrderStructure) -> list:
        """Re-check the hedge inequality and duality exactly; returns problems."""
        problems = []
        gain = market.gain(self.strategy)
        if gain != self.gain:
            problems.append("gain does not match strategy")
        excess = tuple(self.price + g - x for g, x in zip(gain, self.payoff))
        if any(v < 0 for v in order.apply(excess)):
            problems.append("hedge does not dominate the payoff in the order")
        if self.residual is not None:
            if any(v > 0 for v in self.residual):
                problems.append("residual is not nonpositive")
            if any(v != 0 for v in order.apply(self.residual)):
                problems.append("residual is not negligible")
            if any(e < r for e, r in zip(excess, self.residual)):
                problems.append("pointwise inequality with residual fails")
        if dot(self.dual, self.payoff) != self.price:
            problems.append("dual value differs from price")
        return problems


def hedge_program(market: ValidatedMarket, order: OrderStructure, x) -> LinearProgram:
    """min c  s.t.  c * (L 1) + sum_i h_i (L g_i) >= L X."""
    return target_hedge_program(market, order, order.apply(x))


def target_hedge_program(market: ValidatedMarket, order: OrderStructure, lx) -> LinearProgram:
    """Hedge LP against a test-space image ``lx`` rather than a payoff."""
    mass = order.row_mass()
    images = [order.apply(g.payoff) for g in market.generators]
    rows = [[mass[k]] + [img[k] for img in images] for k in range(order.rows)]
    hb = FREE if market.linear else NONNEG
    bounds = [FREE] + [hb] * len(images)
    return LinearProgram.build([1] + [0] * len(images), rows, [GE] * order.rows, lx, bounds, "min")


def superhedge_price(market: ValidatedMarket, order: OrderStructure, x) -> HedgeCertificate:
    x = market.check_payoff(x)
    out = solve(hedge_program(market, order, x))
    if not out.optimal:
        if out.ray is not None:
            h = out.ray[1:]
            raise UnboundedBelow("superhedge price is unbounded below: the market admits arbitrage",
                                 {"strategy": h, "gain": market.gain(h)})
        raise UnboundedBelow("superhedge price is unbounded below")
    price = out.objective
    h = tuple(out.x[1:])
    gain = market.gain(h)
    residual = None
    if order.state_based:
        residual = tuple(min(price + g - v, Fraction(0)) for g, v in zip(gain, x))
    dual = order.functional(out.y)
    return HedgeCertificate(price, h, gain, residual, dual, x)


def target_price(market: ValidatedMarket, order: OrderStructure, lx) -> Optional[Fraction]:
    """Superhedge price of a test-space target; None stands for minus infinity."""
    out = solve(target_hedge_program(market, order, lx))
    return out.objective if out.optimal else None


def sublinear_expectation(market: ValidatedMarket, order: OrderStructure, x) -> Fraction:
    x = market.check_payoff(x)
    res = MartingalePolytope(market, order).support(x)
    if res is None:
        raise EmptyPolytope("no absolutely continuous martingale functional exists")
    return res[0]


@dataclass(frozen=True)
class ViabilityReport:
    passed: bool
    polytope_empty: bool
    values: tuple  # max over polytope per relevance generator (None if empty)
    witnesses: tuple  # maximizing state vectors
    row_charges: Optional[tuple] = None  # expectation orders: max lam_k per test row
    backing: str = "viability-equivalence"
    caveat: Optional[str] = None


def full_support_check(market: ValidatedMarket, order: OrderStructure, rel: RelevanceSpec,
                       workers: int = 1) -> ViabilityReport:
    poly = MartingalePolytope(market, order)
    if poly.is_empty():
        return ViabilityReport(False, True, (None,) * len(rel), (None,) * len(rel),
                               (None,) * order.rows if not order.state_based else None,
                               caveat=_caveat(order))
    outs = solve_many([poly.program(t) for t in rel.targets], workers)
    values = tuple(o.objective for o in outs)
    wits = tuple(order.functional(poly._lift(o.x)) for o in outs)
    row_charges = None
    if not order.state_based:
        rc = solve_many([poly.program(unit(order.rows, k)) for k in range(order.rows)], workers)
        row_charges = tuple(o.objective for o in rc)
    passed = all(v > 0 for v in values)
    return ViabilityReport(passed, False, values, wits, row_charges, caveat=_caveat(order))


def _caveat(order):
    if order.state_based:
        return None
    return "expectation order: relevance reduced to test-row targets (sufficient procedure)"
