"""Scenario-support sets and the restricted pricing machinery built on them.

``support_set`` peels away, backwards in time, the states that some one-step
strategy can gain on without risk inside the current set.  What survives is
exactly the set of states charged by a martingale measure living on the set,
which is cross-checked state by state with independent LPs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arbitrage import find_arbitrage
from .errors import (
    ArbitragePresent,
    BadR,
    BadZ,
    DimensionMismatch,
    EmptySupport,
    InternalInconsistency,
    OrderUnsupported,
)
from .lp import FREE, GE, NONNEG, LinearProgram, solve
from .market import ValidatedMarket
from .order import (
    QUASI_SURE,
    Classification,
    OrderStructure,
    build_order,
    classify,
    default_relevance,
)
from .rational import dot, to_fraction
from .superhedge import MartingalePolytope, superhedge_price


class SplittingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SplitRecord:
    time: int
    beta: int
    strategies: tuple  # one payoff per split, each >= 0 on what remained
    coefficients: tuple  # generator weights producing each payoff
    cells: tuple  # B^1..B^beta as sorted state-index tuples
    residual: tuple  # B^0
    warning: Optional[str] = None


@dataclass(frozen=True)
class SupportResult:
    input_set: frozenset
    final_set: frozenset
    records: tuple  # SplitRecord per time, from T down to 1
    charged_set: frozenset  # per-state charging LP answer
    agrees: bool


def _gate(order):
    if order is not None and not order.state_based:
        raise OrderUnsupported("scenario support needs a state-based order")


def _step_groups(market: ValidatedMarket):
    """(time, generator indices) from the last step to the first.

    Custom generators have no dynamic structure, so a market that uses them
    is treated as a single step over all of them.
    """
    gens = market.generators
    if any(not g.derived for g in gens):
        return [(1, list(range(len(gens))))]
    return [(t, [i for i, g in enumerate(gens) if g.time == t])
            for t in range(market.horizon, 0, -1)]


def _split(market: ValidatedMarket, time: int, indices, gamma) -> SplitRecord:
    gens = market.generators
    h_bound = FREE if market.linear else NONNEG
    remaining = sorted(gamma)
    strategies, coeffs, cells = [], [], []
    while remaining and indices:
        ng, nu = len(indices), len(remaining)
        rows = []
        for j, w in enumerate(remaining):
            rows.append([gens[i].payoff[w] for i in indices]
                        + [Fraction(-1) if k == j else Fraction(0) for k in range(nu)])
        bounds = [h_bound] * ng + [(Fraction(0), Fraction(1))] * nu
        lp = LinearProgram.build([0] * ng + [1] * nu, rows, [GE] * nu, [0] * nu, bounds, "max")
        out = solve(lp)
        if out.objective == 0:
            break
        h = [Fraction(0)] * len(gens)
        for i, v in zip(indices, out.x[:ng]):
            h[i] = v
        payoff = market.gain(h)
        cell = tuple(w for w in remaining if payoff[w] > 0)
        strategies.append(payoff)
        coeffs.append(tuple(h))
        cells.append(cell)
        remaining = [w for w in remaining if payoff[w] == 0]
    beta = len(cells)
    note = None
    n_assets = max(1, len(market.prices.assets))
    if beta > n_assets and all(gens[i].derived for i in indices):
        note = f"splitting at t={time} used {beta} steps, more than the {n_assets} assets"
        warnings.warn(note, SplittingWarning, stacklevel=3)
    return SplitRecord(time, beta, tuple(strategies), tuple(coeffs), tuple(cells), tuple(remaining), note)


def conditional_splitting(market: ValidatedMarket, t: int, gamma, order: Optional[OrderStructure] = None
                          ) -> SplitRecord:
    """Split ``gamma`` by maximal-support one-point arbitrages at time ``t``."""
    _gate(order)
    gamma = frozenset(gamma)
    if not gamma:
        raise DimensionMismatch("the set to split must be nonempty")
    if not 1 <= t <= market.horizon:
        raise DimensionMismatch(f"time {t} outside 1..{market.horizon}")
    groups = dict(_step_groups(market))
    indices = groups.get(t, [])
    return _split(market, t, indices, gamma)


def _pointwise_on(market, states) -> OrderStructure:
    """Order whose test rows are the Diracs of ``states``."""
    states = sorted(states)
    p = [Fraction(0)] * market.n
    for w in states:
        p[w] = Fraction(1, len(states))
    return build_order(QUASI_SURE, market.n, [p])


def charged_states(market: ValidatedMarket, states, workers: int = 1) -> frozenset:
    """States some martingale measure supported in ``states`` charges (one LP each)."""
    states = frozenset(states)
    if not states:
        return frozenset()
    order = _pointwise_on(market, states)
    poly = MartingalePolytope(market, order)
    res = poly.charges(sorted(states), workers)
    return frozenset(w for w, r in res.items() if r is not None and r[0] > 0)


def support_set(market: ValidatedMarket, order: Optional[OrderStructure], states,
                workers: int = 1) -> SupportResult:
    _gate(order)
    a = frozenset(states)
    for w in a:
        if not 0 <= w < market.n:
            raise DimensionMismatch(f"state index {w} out of range")
    current = a
    records = []
    for t, indices in _step_groups(market):
        if not current:
            break
        rec = _split(market, t, indices, current)
        records.append(rec)
        current = frozenset(rec.residual)
    charged = charged_states(market, a, workers)
    return SupportResult(a, current, tuple(records), charged, charged == current)


def superhedge_on_set(market: ValidatedMarket, payoff, states, workers: int = 1):
    """Cheapest hedge of ``payoff`` on the support of ``states``.

    Returns ``(price, strategy, measure)`` where ``measure`` is a martingale
    measure living on the support that attains the same value.
    """
    x = market.check_payoff(payoff)
    star = support_set(market, None, states, workers).final_set
    if not star:
        raise EmptySupport("no martingale measure lives on the given set")
    order = _pointwise_on(market, star)
    cert = superhedge_price(market, order, x)
    dual = MartingalePolytope(market, order).support(x)
    if dual is None or dual[0] != cert.price:
        raise InternalInconsistency("restricted hedge and restricted dual disagree")
    return cert.price, cert.strategy, dual[1]


@dataclass(frozen=True)
class ReductionReport:
    price: Fraction  # D(X)
    restricted_price: Fraction  # D on {Z = 0}*
    dual_value: Fraction  # sup over martingale measures on {Z = 0}*
    zero_set: frozenset
    support: frozenset
    residual: tuple
    measure: tuple

    @property
    def holds(self) -> bool:
        return self.price == self.restricted_price == self.dual_value


def technical_reduction(market: ValidatedMarket, order: OrderStructure, payoff,
                        workers: int = 1) -> ReductionReport:
    if not order.state_based:
        raise OrderUnsupported("the reduction needs a state-based order")
    cert = find_arbitrage(market, order, default_relevance("rop", order))
    if cert is not None:
        raise ArbitragePresent("market admits arbitrage; attainment is not available", cert)
    x = market.check_payoff(payoff)
    hedge = superhedge_price(market, order, x)
    zero = frozenset(w for w, z in enumerate(hedge.residual) if z == 0)
    star = support_set(market, None, zero, workers).final_set
    if not star:
        raise EmptySupport("the zero set of the residual supports no martingale measure")
    restricted, _, measure = superhedge_on_set(market, x, star, workers)
    dual = MartingalePolytope(market, _pointwise_on(market, star)).support(x)
    return ReductionReport(hedge.price, restricted, dual[0], zero, star, hedge.residual, measure)


def ftap_certificates(market: ValidatedMarket, order: OrderStructure, z, r) -> Optional[tuple]:
    """A martingale measure on ``{Z = 0}`` pricing ``R`` strictly positive, if one exists."""
    if not order.state_based:
        raise OrderUnsupported("certificates need a state-based order")
    z = tuple(to_fraction(v) for v in z)
    r = tuple(to_fraction(v) for v in r)
    if len(z) != market.n or len(r) != market.n:
        raise DimensionMismatch("Z and R must have one entry per state")
    if any(v > 0 for v in z) or classify(z, order) is not Classification.NEGLIGIBLE:
        raise BadZ("Z must be negligible and nonpositive")
    if classify(r, order) is not Classification.POSITIVE:
        raise BadR("R must be positive and not negligible")
    zero = [w for w in range(market.n) if z[w] == 0]
    if not zero:
        return None
    res = MartingalePolytope(market, _pointwise_on(market, zero)).support(r)
    if res is None or res[0] <= 0:
        return None
    q = res[1]
    if dot(q, z) != 0:
        raise InternalInconsistency("certificate charges the set where Z < 0")
    return q


def ftap_battery(market: ValidatedMarket, order: OrderStructure) -> dict:
    """Reduced pair family: Z = -1 on polar states, R = each non-polar Dirac."""
    polar = order.polar_mask
    z = tuple(Fraction(-1) if w in polar else Fraction(0) for w in range(market.n))
    out = {}
    for w in sorted(order.support):
        r = tuple(Fraction(1 if v == w else 0) for v in range(market.n))
        out[w] = ftap_certificates(market, order, z, r)
    return out
