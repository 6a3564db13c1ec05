"""Common pre-orders encoded by a finite test matrix.

An order is a matrix ``L`` of nonnegative functionals with ``X >= 0`` iff
``L @ X >= 0``.  Every downstream LP is written once against ``L``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionMismatch, EmptyPriorSet, InvalidRelevance, NonProbabilityVector
from .rational import dot, solve as linsolve, to_fraction, unit

POINTWISE = "pointwise"
ALMOST_SURE = "almost_sure"
QUASI_SURE = "quasi_sure"
EXPECTATION = "expectation"
SMOOTH = "smooth"
KINDS = (POINTWISE, ALMOST_SURE, QUASI_SURE, EXPECTATION, SMOOTH)

_ALIASES = {
    "pointwise": POINTWISE,
    "almost_sure": ALMOST_SURE, "almost-sure": ALMOST_SURE, "as": ALMOST_SURE,
    "quasi_sure": QUASI_SURE, "quasi-sure": QUASI_SURE, "qs": QUASI_SURE,
    "expectation": EXPECTATION,
    "smooth": SMOOTH, "smooth_ambiguity": SMOOTH, "smooth-ambiguity": SMOOTH,
}


class Classification(str, enum.Enum):
    NEGLIGIBLE = "negligible"
    POSITIVE = "positive"
    NEGATIVE_OF_POSITIVE = "negative_of_positive"
    NEITHER = "neither"


def _probability(p, n, what="prior") -> tuple:
    v = tuple(to_fraction(x) for x in p)
    if len(v) != n:
        raise DimensionMismatch(f"{what} has {len(v)} entries, expected {n}")
    if any(x < 0 for x in v) or sum(v) != 1:
        raise NonProbabilityVector(f"{what} {[str(x) for x in v]} is not a probability vector")
    return v


@dataclass(frozen=True)
class OrderStructure:
    kind: str
    n: int
    test_matrix: tuple  # rows are nonnegative functionals on R^n
    priors: tuple = ()
    mixture: Optional[tuple] = None  # the averaged prior for smooth orders
    weights: Optional[tuple] = None

    @property
    def rows(self) -> int:
        return len(self.test_matrix)

    @property
    def state_based(self) -> bool:
        return self.kind != EXPECTATION

    @property
    def support(self) -> frozenset:
        return frozenset(w for w in range(self.n) if any(r[w] != 0 for r in self.test_matrix))

    @property
    def polar_mask(self) -> frozenset:
        return frozenset(range(self.n)) - self.support

    def apply(self, x) -> tuple:
        return tuple(dot(r, x) for r in self.test_matrix)

    def row_mass(self) -> tuple:
        """``L @ 1``: the value each test row assigns to the unit payoff."""
        return tuple(sum(r, Fraction(0)) for r in self.test_matrix)

    def functional(self, lam) -> tuple:
        """The state vector ``L^T lam``."""
        return tuple(
            sum((lam[k] * self.test_matrix[k][w] for k in range(self.rows)), Fraction(0))
            for w in range(self.n)
        )


def build_order(kind: str, n: int, priors=None, weights=None) -> OrderStructure:
    kind = _ALIASES.get(str(kind).lower())
    if kind is None:
        raise DimensionMismatch(f"unknown order kind; expected one of {KINDS}")
    if n < 1:
        raise DimensionMismatch("order needs at least one state")
    if kind == POINTWISE:
        return OrderStructure(kind, n, tuple(unit(n, w) for w in range(n)))
    if not priors:
        raise EmptyPriorSet(f"order kind {kind!r} needs at least one prior")
    ps = tuple(_probability(p, n) for p in priors)
    if kind == EXPECTATION:
        rows = []
        for p in ps:  # repeated priors add nothing
            if p not in rows:
                rows.append(p)
        return OrderStructure(kind, n, tuple(rows), ps)
    mixture = None
    w_vec = None
    if kind == SMOOTH:
        if weights is None:
            raise EmptyPriorSet("smooth ambiguity needs mixture weights")
        w_vec = _probability(weights, len(ps), "mixture weights")
        mixture = tuple(sum((w_vec[i] * ps[i][s] for i in range(len(ps))), Fraction(0)) for s in range(n))
        charged = [mixture]
    elif kind == ALMOST_SURE:
        if len(ps) != 1:
            raise DimensionMismatch("almost-sure order takes exactly one prior")
        charged = ps
    else:
        charged = ps
    support = sorted({s for p in charged for s in range(n) if p[s] > 0})
    return OrderStructure(kind, n, tuple(unit(n, s) for s in support), ps, mixture, w_vec)


def classify(x, order: OrderStructure) -> Classification:
    lx = order.apply(x)
    if all(v == 0 for v in lx):
        return Classification.NEGLIGIBLE
    if all(v >= 0 for v in lx):
        return Classification.POSITIVE
    if all(v <= 0 for v in lx):
        return Classification.NEGATIVE_OF_POSITIVE
    return Classification.NEITHER


def dominates(x, y, order: OrderStructure) -> bool:
    """True iff ``x <= y`` in the order."""
    return all(v >= 0 for v in order.apply(tuple(b - a for a, b in zip(x, y))))


def is_negligible(x, order: OrderStructure) -> bool:
    return classify(x, order) is Classification.NEGLIGIBLE


ROP, ROPEN, RPLUS, RUNIFORM, CUSTOM = "rop", "ropen", "rplus", "runiform", "custom"
PRESETS = (ROP, ROPEN, RPLUS, RUNIFORM, CUSTOM)


@dataclass(frozen=True)
class RelevanceSpec:
    """Finite generator family of the relevant claims.

    Each generator is stored by its image ``target = L @ g`` in test space and,
    when one exists, a payoff ``g`` realizing it.  Expectation orders use
    the row targets ``e_k``; those need not be realized by any payoff.
    """

    preset: str
    targets: tuple
    payoffs: tuple  # payoff or None, aligned with targets
    everywhere_positive: bool = False

    def __len__(self):
        return len(self.targets)


def default_relevance(preset: str, order: OrderStructure) -> RelevanceSpec:
    preset = str(preset).lower()
    if preset not in PRESETS or preset == CUSTOM:
        raise InvalidRelevance(f"unknown relevance preset {preset!r}")
    n = order.n
    if preset in (RPLUS, RUNIFORM):
        one = (Fraction(1),) * n
        return RelevanceSpec(preset, (order.apply(one),), (one,), preset == RPLUS)
    if order.kind == EXPECTATION:
        k = order.rows
        targets = tuple(unit(k, i) for i in range(k))
        cols = [list(r) for r in order.test_matrix]
        payoffs = tuple(linsolve(cols, t) for t in targets)
        return RelevanceSpec(preset, targets, payoffs)
    payoffs = tuple(unit(n, w) for w in sorted(order.support))
    return RelevanceSpec(preset, tuple(order.apply(g) for g in payoffs), payoffs)


def custom_relevance(generators: Sequence, order: OrderStructure) -> RelevanceSpec:
    payoffs = []
    targets = []
    for i, raw in enumerate(generators):
        g = tuple(to_fraction(v) for v in raw)
        if len(g) != order.n:
            raise DimensionMismatch(f"relevance generator {i} has {len(g)} entries for {order.n} states")
        if classify(g, order) is not Classification.POSITIVE:
            raise InvalidRelevance(f"relevance generator {i} is not positive in the order")
        payoffs.append(g)
        targets.append(order.apply(g))
    if not payoffs:
        raise InvalidRelevance("custom relevance needs at least one generator")
    return RelevanceSpec(CUSTOM, tuple(targets), tuple(payoffs))
