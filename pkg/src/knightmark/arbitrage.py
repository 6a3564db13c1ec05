"""Arbitrage and free-lunch detection with exact certificates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InternalInconsistency, OrderUnsupported
from .lp import FREE, GE, NONNEG, LinearProgram, solve
from .market import ValidatedMarket
from .order import Classification, OrderStructure, RelevanceSpec, classify
from .superhedge import target_price

TAG_LATTICE = "attainment-equivalence-lattice"
TAG_POLYHEDRAL = "polyhedral-closedness"
TAG_SUPERHEDGE = "positive-price-of-relevant-claims"


@dataclass(frozen=True)
class ArbitrageCertificate:
    strategy: tuple  # coefficient per net-trade generator
    payoff: tuple  # realized net trade l
    relevant_index: int  # which relevance generator is dominated
    relevant: tuple  # R*: a payoff dominated by l
    witness_rows: tuple  # test rows where L l > 0

    def scaled(self, factor) -> "ArbitrageCertificate":
        factor = Fraction(factor)
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return ArbitrageCertificate(tuple(factor * h for h in self.strategy),
                                    tuple(factor * v for v in self.payoff),
                                    self.relevant_index,
                                    tuple(factor * v for v in self.relevant),
                                    self.witness_rows)


def _program(market, order, images, target, h_bound):
    """max s + sum u  s.t.  L G h - s r >= 0,  L G h - s r - u >= 0."""
    k, ng = order.rows, len(images)
    rows, rhs = [], []
    for i in range(k):
        rows.append([img[i] for img in images] + [-target[i]] + [Fraction(0)] * k)
        rhs.append(Fraction(0))
    for i in range(k):
        rows.append([img[i] for img in images] + [-target[i]]
                    + [Fraction(-1) if j == i else Fraction(0) for j in range(k)])
        rhs.append(Fraction(0))
    bounds = [h_bound] * ng + [(Fraction(0), Fraction(1))] * (1 + k)
    obj = [0] * ng + [1] * (1 + k)
    return LinearProgram.build(obj, rows, [GE] * len(rows), rhs, bounds, "max")


def _certificate(market, order, rel, idx, h):
    lx = order.apply(market.gain(h))
    target = rel.targets[idx]
    # smallest multiple of the strategy that still dominates the target
    c = max(t / v for t, v in zip(target, lx) if t > 0)
    h = [c * v for v in h]
    payoff = market.gain(h)
    lx = order.apply(payoff)
    relevant = rel.payoffs[idx] if rel.payoffs[idx] is not None else payoff
    witness = tuple(k for k, v in enumerate(lx) if v > 0)
    return ArbitrageCertificate(tuple(h), payoff, idx, relevant, witness)


def find_arbitrage(market: ValidatedMarket, order: OrderStructure, rel: RelevanceSpec,
                   workers: int = 1) -> Optional[ArbitrageCertificate]:
    """One LP per relevance generator; returns the certificate of the first hit."""
    gens = market.generators
    if not gens:
        return None
    images = [order.apply(g.payoff) for g in gens]
    h_bound = FREE if market.linear else NONNEG
    lps = [_program(market, order, images, t, h_bound) for t in rel.targets]
    if workers > 1:
        from .lp import solve_many
        outs = solve_many(lps, workers)
    else:
        outs = []
        for lp in lps:
            out = solve(lp)
            outs.append(out)
            if out.x[len(gens)] > 0:
                break
    for idx, out in enumerate(outs):
        s = out.x[len(gens)]
        if s > 0:
            if s != 1:
                raise InternalInconsistency("arbitrage LP optimum has fractional scale")
            return _certificate(market, order, rel, idx, out.x[:len(gens)])
    return None


def verify_arbitrage(market: ValidatedMarket, order: OrderStructure, rel: RelevanceSpec,
                     cert: ArbitrageCertificate) -> list:
    """Independent re-validation of a certificate; returns a list of problems."""
    problems = []
    if len(cert.strategy) != len(market.generators):
        return ["strategy length does not match the generators"]
    if not market.linear and any(h < 0 for h in cert.strategy):
        problems.append("negative weight in cone mode")
    if market.gain(cert.strategy) != tuple(cert.payoff):
        problems.append("payoff is not the gain of the strategy")
    if classify(cert.payoff, order) is not Classification.POSITIVE:
        problems.append("payoff is not positive in the order")
    lx = order.apply(cert.payoff)
    lr = order.apply(cert.relevant)
    if any(a < b for a, b in zip(lx, lr)):
        problems.append("payoff does not dominate the relevant claim")
    target = rel.targets[cert.relevant_index]
    if rel.payoffs[cert.relevant_index] is not None:
        if not _positive_multiple(cert.relevant, rel.payoffs[cert.relevant_index]):
            problems.append("relevant claim is not a multiple of the named generator")
    elif not any(v > 0 for v, t in zip(lx, target) if t > 0):
        problems.append("payoff misses the relevant test row")
    if classify(cert.relevant, order) is not Classification.POSITIVE:
        problems.append("relevant claim is not positive")
    return problems


def _positive_multiple(x, g) -> bool:
    pivot = next((i for i, v in enumerate(g) if v != 0), None)
    if pivot is None:
        return False
    c = Fraction(x[pivot]) / g[pivot]
    return c > 0 and all(a == c * b for a, b in zip(x, g))


@dataclass(frozen=True)
class OneStepResult:
    time: int
    strategy: tuple  # coefficients over market.generators (zero off time ``time``)
    certificate: ArbitrageCertificate


def find_one_step_arbitrage(market: ValidatedMarket, order: OrderStructure) -> Optional[OneStepResult]:
    """Search each trading time separately for a gain that is positive and nonzero.

    Relevance is the full positive cone (every non-polar Dirac), which is the
    setting of the one-step reduction.
    """
    if not order.state_based:
        raise OrderUnsupported("one-step reduction needs a state-based order")
    gens = market.generators
    h_bound = FREE if market.linear else NONNEG
    k = order.rows
    for t in market.trading_times():
        pos = [i for i, g in enumerate(gens) if (g.time or 1) == t]
        images = [order.apply(gens[i].payoff) for i in pos]
        ng = len(images)
        rows, rhs = [], []
        for r in range(k):
            rows.append([img[r] for img in images] + [Fraction(0)] * k)
            rhs.append(Fraction(0))
            rows.append([img[r] for img in images] + [Fraction(-1) if j == r else Fraction(0) for j in range(k)])
            rhs.append(Fraction(0))
        bounds = [h_bound] * ng + [(Fraction(0), Fraction(1))] * k
        lp = LinearProgram.build([0] * ng + [1] * k, rows, [GE] * len(rows), rhs, bounds, "max")
        out = solve(lp)
        if out.objective > 0:
            h = [Fraction(0)] * len(gens)
            for i, v in zip(pos, out.x[:ng]):
                h[i] = v
            lx = order.apply(market.gain(h))
            best = min(r for r in range(k) if lx[r] > 0)
            # rescale so the gain dominates the Dirac on the first strict row
            h = [v / lx[best] for v in h]
            payoff = market.gain(h)
            lx = order.apply(payoff)
            relevant = tuple(Fraction(1 if w == _row_state(order, best) else 0) for w in range(order.n))
            cert = ArbitrageCertificate(tuple(h), payoff, best, relevant,
                                        tuple(r for r, v in enumerate(lx) if v > 0))
            return OneStepResult(t, tuple(h), cert)
    return None


def _row_state(order, k):
    row = order.test_matrix[k]
    return next(w for w, v in enumerate(row) if v != 0)


@dataclass(frozen=True)
class NflvrVerdict:
    strongly_free: bool
    certificate: Optional[ArbitrageCertificate]
    prices: tuple  # superhedge price of each relevance generator (None = minus infinity)
    backing: str
    cross_check: str = TAG_SUPERHEDGE

    @property
    def status(self) -> str:
        return "StronglyFree" if self.strongly_free else "FreeLunch"


def check_nflvr(market: ValidatedMarket, order: OrderStructure, rel: RelevanceSpec,
                workers: int = 1) -> NflvrVerdict:
    """At finite scale a free lunch is an arbitrage; cross-checked via superhedge prices."""
    cert = find_arbitrage(market, order, rel, workers)
    prices = tuple(target_price(market, order, t) for t in rel.targets)
    positive = all(p is not None and p > 0 for p in prices)
    if positive != (cert is None):
        raise InternalInconsistency("arbitrage LP and superhedge prices disagree")
    backing = TAG_LATTICE if order.state_based else TAG_POLYHEDRAL
    return NflvrVerdict(cert is None, cert, prices, backing)
