"""Efficient-market diagnostics under risk and under Knightian uncertainty."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DiagnosticLimit, EmptyPolytope
from .lp import EQ, NONNEG, LinearProgram, solve
from .market import ValidatedMarket
from .order import ALMOST_SURE, EXPECTATION, QUASI_SURE, OrderStructure, build_order
from .rational import dot, nullspace
from .superhedge import MartingalePolytope

STRONG, WEAK, K_STRONG, K_WEAK, SMOOTH = "strong", "weak", "k-strong", "k-weak", "smooth"
VARIANTS = (STRONG, WEAK, K_STRONG, K_WEAK, SMOOTH)


@dataclass(frozen=True)
class EmhReport:
    variant: str
    verdict: bool
    measures: tuple = ()  # (name, state vector) pairs that must lie in the polytope
    witnesses: dict = field(default_factory=dict)
    order: Optional[OrderStructure] = field(default=None, compare=False)
    note: Optional[str] = None
    backing: str = ""

    def verify(self, market: ValidatedMarket) -> list:
        """Check every witness measure against the polytope of this variant's order."""
        if self.order is None:
            return []
        poly = MartingalePolytope(market, self.order)
        return [f"witness {name} is not in the polytope" for name, q in self.measures
                if not poly.contains(q)]


def _is_martingale(market, p) -> bool:
    for g in market.generators:
        v = dot(p, g.payoff)
        if (market.linear and v != 0) or (not market.linear and v > 0):
            return False
    return True


def strong_emh(market: ValidatedMarket, prior) -> EmhReport:
    order = build_order(EXPECTATION, market.n, [prior])
    p = order.priors[0]
    verdict = _is_martingale(market, p)
    wit = {"prior": p, "unique": verdict}
    if verdict:
        # P is then the only functional of its own expectation order; also
        # report whether it is the only martingale measure with its support.
        eq = MartingalePolytope(market, build_order(ALMOST_SURE, market.n, [p]))
        wit["unique_among_equivalent"] = eq.is_singleton() is not None
    return EmhReport(STRONG, verdict, ((("prior", p),) if verdict else ()), wit, order,
                     backing="prior-is-martingale")


def weak_emh(market: ValidatedMarket, prior, workers: int = 1) -> EmhReport:
    order = build_order(ALMOST_SURE, market.n, [prior])
    p = order.priors[0]
    supp = sorted(order.support)
    poly = MartingalePolytope(market, order)
    res = poly.charges(supp, workers)
    charged = {w: r for w, r in res.items() if r is not None and r[0] > 0}
    verdict = len(charged) == len(supp)
    wit = {"prior": p, "charged": tuple(sorted(charged)), "uncharged": tuple(w for w in supp if w not in charged)}
    measures = tuple((f"charge[{w}]", r[1]) for w, r in sorted(charged.items()))
    if verdict:
        q = tuple(sum((r[1][s] for r in charged.values()), Fraction(0)) / len(charged) for s in range(market.n))
        wit["equivalent_measure"] = q
        wit["density"] = tuple(q[w] / p[w] if p[w] > 0 else Fraction(0) for w in range(market.n))
        measures = measures + (("equivalent_measure", q),)
    return EmhReport(WEAK, verdict, measures, wit, order, backing="equivalent-martingale-measure")


def _in_hull(q, priors) -> Optional[tuple]:
    n, k = len(q), len(priors)
    rows = [[p[w] for p in priors] for w in range(n)] + [[Fraction(1)] * k]
    lp = LinearProgram.build([0] * k, rows, [EQ] * (n + 1), list(q) + [1], [NONNEG] * k)
    out = solve(lp)
    return out.x if out.optimal else None


def mean_ambiguity_free_basis(priors) -> list:
    """Basis of payoffs with the same expectation under every prior."""
    n = len(priors[0])
    diffs = [tuple(a - b for a, b in zip(p, priors[0])) for p in priors[1:]]
    diffs = [d for d in diffs if any(d)]
    return nullspace(diffs, n) if diffs else nullspace([], n)


def knightian_strong(market: ValidatedMarket, priors, workers: int = 1) -> EmhReport:
    order = build_order(EXPECTATION, market.n, priors)
    gens = order.test_matrix
    poly = MartingalePolytope(market, order)
    if poly.is_empty():
        raise EmptyPolytope("no martingale functional is positive for this expectation order")
    try:
        pts = poly.vertices()
        exhaustive = True
    except DiagnosticLimit:  # fall back to one point
        pts = [poly.feasible_point()]
        exhaustive = False
    weights = [_in_hull(q, gens) for q in pts]
    verdict1 = all(w is not None for w in weights)
    per_generator = all(q in gens for q in pts)
    basis = mean_ambiguity_free_basis(list(gens))
    verdict2 = True
    common = []
    for x in basis:
        e = dot(gens[0], x)
        common.append(e)
        hi, lo = poly.support(x)[0], poly.minimize(x)[0]
        if hi != e or lo != e:
            verdict2 = False
    singleton = poly.is_singleton()
    wit = {
        "vertices": tuple(pts),
        "vertices_exhaustive": exhaustive,
        "hull_weights": tuple(weights),
        "per_generator_inclusion": per_generator,
        "mean_ambiguity_free_basis": tuple(basis),
        "common_expectations": tuple(common),
        "restricted_agreement": verdict2,
        "singleton": singleton,
    }
    measures = tuple((f"vertex[{i}]", q) for i, q in enumerate(pts))
    return EmhReport(K_STRONG, verdict1, measures, wit, order,
                     note="necessary condition verified (inclusion only)",
                     backing="martingale-functionals-inside-priors")


def knightian_weak(market: ValidatedMarket, priors, workers: int = 1) -> EmhReport:
    from .support import support_set

    order = build_order(QUASI_SURE, market.n, priors)
    non_polar = sorted(order.support)
    poly = MartingalePolytope(market, order)
    res = poly.charges(non_polar, workers)
    charged = tuple(w for w in non_polar if res[w] is not None and res[w][0] > 0)
    star = support_set(market, order, non_polar, workers).final_set
    verdict = charged == tuple(non_polar)
    wit = {
        "non_polar": tuple(non_polar),
        "charged": charged,
        "support_set": tuple(sorted(star)),
        "support_matches": star == frozenset(non_polar),
    }
    measures = tuple((f"charge[{w}]", res[w][1]) for w in charged)
    return EmhReport(K_WEAK, verdict, measures, wit, order, backing="same-polar-sets")


def smooth_emh(market: ValidatedMarket, weights, priors, workers: int = 1) -> EmhReport:
    order = build_order("smooth", market.n, priors, weights)
    mixture = order.mixture
    weak = weak_emh(market, mixture, workers)
    wit = dict(weak.witnesses)
    wit["mixture"] = mixture
    if "density" in wit:
        wit["state_price_density"] = wit.pop("density")
    return EmhReport(SMOOTH, weak.verdict, weak.measures, wit, weak.order, backing="mixture-equivalent-measure")
