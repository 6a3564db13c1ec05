"""Random small markets and an executable battery of the equivalence results.

Every check compares two independently computed exact answers.  A failing
market is shrunk (states, then dates, then assets) while the same check keeps
failing, and the minimal document is returned with the result.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .arbitrage import check_nflvr, find_arbitrage, find_one_step_arbitrage, verify_arbitrage
from .document import AssetDoc, ConeDoc, MarketSpecDocument, OrderDoc, RelevanceDoc
from .errors import KnightmarkError, OrderUnsupported, UnboundedBelow
from .io import Setup, build_setup, document_to_json
from .order import CUSTOM, default_relevance
from .rational import nullspace
from .superhedge import MartingalePolytope, full_support_check, superhedge_price
from .support import ftap_battery, ftap_certificates, support_set, technical_reduction


@dataclass(frozen=True)
class GeneratorConfig:
    max_states: int = 12
    max_times: int = 3
    max_assets: int = 2
    price_bound: int = 4
    max_priors: int = 3
    seed: int = 0

    def __post_init__(self):
        for name in ("max_states", "max_times", "max_assets", "price_bound", "max_priors"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


_FACTORS = [Fraction(0), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1),
            Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3)]


def _split_cell(rng, cell, force_discrete):
    if force_discrete:
        return [[w] for w in cell]
    members = list(cell)
    rng.shuffle(members)
    k = rng.randint(1, len(members))
    cuts = sorted(rng.sample(range(1, len(members)), k - 1)) if k > 1 else []
    parts, prev = [], 0
    for c in cuts + [len(members)]:
        parts.append(sorted(members[prev:c]))
        prev = c
    return parts


def _martingale_children(rng, parent, probs):
    """Child values with conditional mean ``parent`` under ``probs``."""
    if len(probs) == 1:
        return [parent]
    for _ in range(10):
        head = [parent * rng.choice(_FACTORS) for _ in probs[:-1]]
        last = (parent - sum((p * v for p, v in zip(probs, head)), Fraction(0))) / probs[-1]
        if last >= 0:
            return head + [last]
    return [parent] * len(probs)


def _random_prior(rng, n, support=None, full=False):
    if full:
        support = list(range(n))
    if support is None:
        size = rng.randint(1, n)
        support = rng.sample(range(n), size)
    weights = [rng.randint(1, 5) for _ in support]
    total = sum(weights)
    p = [Fraction(0)] * n
    for w, x in zip(support, weights):
        p[w] = Fraction(x, total)
    return tuple(p)


def generate_market(cfg: GeneratorConfig = GeneratorConfig(), seed: Optional[int] = None) -> MarketSpecDocument:
    """Deterministic random market for ``seed`` (defaults to ``cfg.seed``)."""
    rng = random.Random(cfg.seed if seed is None else seed)
    n = rng.randint(min(2, cfg.max_states), cfg.max_states)
    horizon = rng.randint(1, cfg.max_times)
    labels = [f"s{i}" for i in range(n)]

    parts = [[list(range(n))]]
    discrete_end = rng.random() < 0.75
    for t in range(1, horizon + 1):
        nxt = []
        for cell in parts[-1]:
            nxt.extend(_split_cell(rng, cell, discrete_end and t == horizon))
        parts.append(sorted(nxt))

    n_assets = rng.randint(1, cfg.max_assets)
    # half the markets are martingales under a random full-support measure
    by_design = rng.random() < 0.5
    cond = {}
    if by_design:
        for t in range(1, horizon + 1):
            for cell in parts[t - 1]:
                children = [c for c in parts[t] if c[0] in cell]
                raw = [rng.randint(1, 4) for _ in children]
                cond[(t, cell[0])] = [Fraction(x, sum(raw)) for x in raw]
    assets = []
    for j in range(n_assets):
        values = [[Fraction(0)] * n for _ in range(horizon + 1)]
        start = Fraction(rng.randint(1, cfg.price_bound), rng.randint(1, 2))
        for w in range(n):
            values[0][w] = start
        for t in range(1, horizon + 1):
            for cell in parts[t - 1]:
                parent = values[t - 1][cell[0]]
                children = [c for c in parts[t] if c[0] in cell]
                if by_design:
                    vals = _martingale_children(rng, parent, cond[(t, cell[0])])
                    for child, v in zip(children, vals):
                        for w in child:
                            values[t][w] = v
                    continue
                mixed = rng.random() < 0.7
                for i, child in enumerate(children):
                    if mixed and len(children) > 1:
                        pool = [f for f in _FACTORS if f > 1] if i == 0 else (
                            [f for f in _FACTORS if f < 1] if i == 1 else _FACTORS)
                    else:
                        pool = _FACTORS
                    f = rng.choice(pool)
                    for w in child:
                        values[t][w] = parent * f
        assets.append(AssetDoc(f"S{j}", tuple(tuple(row) for row in values)))

    mode = "cone" if rng.random() < 0.15 else "linear"
    no_short = None
    if mode == "cone":
        no_short = tuple(a.name for a in assets if rng.random() < 0.5)
    cone = ConeDoc(mode, None, no_short)

    kind = rng.choice(["pointwise", "almost_sure", "quasi_sure", "expectation", "smooth"])
    priors = None
    weights = None
    full = by_design and rng.random() < 0.7
    if kind == "almost_sure":
        priors = (_random_prior(rng, n, full=full),)
    elif kind in ("quasi_sure", "expectation", "smooth"):
        priors = tuple(_random_prior(rng, n, full=full) for _ in range(rng.randint(1, cfg.max_priors)))
        if kind == "smooth":
            weights = _random_prior(rng, len(priors), list(range(len(priors))))
    order = OrderDoc(kind, priors, weights)

    roll = rng.random()
    if roll < 0.6:
        rel = RelevanceDoc("rop")
    elif roll < 0.75:
        rel = RelevanceDoc("rplus")
    elif roll < 0.9:
        rel = RelevanceDoc("runiform")
    else:
        # a positive claim on the first charged state of the first prior (or state 0)
        target = 0
        if priors:
            base = weights_mixture(priors, weights) if kind == "smooth" else priors[0]
            target = next(w for w in range(n) if base[w] > 0)
        g = tuple(Fraction(1) if w == target else Fraction(rng.randint(0, 2)) for w in range(n))
        rel = RelevanceDoc(CUSTOM, (g,))
    return MarketSpecDocument(tuple(labels), tuple(tuple(tuple(labels[w] for w in c) for c in p) for p in parts),
                              tuple(assets), cone, order, rel, None, f"fuzz-{cfg.seed if seed is None else seed}")


def weights_mixture(priors, weights):
    n = len(priors[0])
    return tuple(sum((weights[i] * priors[i][w] for i in range(len(priors))), Fraction(0)) for w in range(n))


# -- battery --------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    passed: bool
    detail: str = ""


@dataclass
class BatteryResult:
    seed: Optional[int]
    checks: dict = field(default_factory=dict)  # name -> CheckResult, in check order
    counterexample: Optional[dict] = None
    shrink_trace: list = field(default_factory=list)
    arbitrage_free: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failures(self) -> list:
        return [name for name, c in self.checks.items() if not c.passed]


CHECKS = ("i_verdicts", "ii_duality", "iii_sublinearity", "iv_negligible",
          "v_support", "vi_reduction", "vii_certificates")


def _random_payoff(rng, market, lo=-3, hi=3):
    vals = [Fraction(0)] * market.n
    for cell in market.filtration.partitions[-1]:
        v = Fraction(rng.randint(lo * 2, hi * 2), rng.choice([1, 2]))
        for w in cell:
            vals[w] = v
    return tuple(vals)


def _negligibles(rng, setup: Setup, count):
    market, order = setup.market, setup.order
    cells = market.filtration.partitions[-1]
    # payoffs constant on terminal cells: X = B c; negligible iff L B c = 0
    lb = [[sum((row[w] for w in cell), Fraction(0)) for cell in cells] for row in order.test_matrix]
    basis = nullspace(lb, len(cells))
    out = []
    for _ in range(count):
        c = [Fraction(0)] * len(cells)
        for b in basis:
            k = rng.randint(-3, 3)
            c = [x + k * y for x, y in zip(c, b)]
        x = [Fraction(0)] * market.n
        for ci, cell in enumerate(cells):
            for w in cell:
                x[w] = c[ci]
        out.append(tuple(x))
    return out


def _guard(fn):
    try:
        return fn()
    except KnightmarkError as exc:
        return CheckResult(False, f"{type(exc).__name__}: {exc}")


def _check_verdicts(setup, workers):
    m, o, r = setup.market, setup.order, setup.relevance
    cert = find_arbitrage(m, o, r, workers)
    nflvr = check_nflvr(m, o, r, workers)
    viab = full_support_check(m, o, r, workers)
    a = cert is None
    if not (a == nflvr.strongly_free == viab.passed):
        return CheckResult(False, f"arbitrage-free={a} nflvr={nflvr.strongly_free} viable={viab.passed}")
    if cert is not None:
        problems = verify_arbitrage(m, o, r, cert)
        if problems:
            return CheckResult(False, "certificate: " + "; ".join(problems))
        scaled = cert.scaled(Fraction(7, 3))
        if verify_arbitrage(m, o, r, scaled):
            return CheckResult(False, "scaled certificate fails")
    if o.state_based:
        rop = default_relevance("rop", o)
        full = find_arbitrage(m, o, rop) is None
        one = find_one_step_arbitrage(m, o)
        if full != (one is None):
            return CheckResult(False, f"positive-cone arbitrage-free={full} but one-step={one is None}")
        if one is not None and verify_arbitrage(m, o, rop, one.certificate):
            return CheckResult(False, "one-step certificate fails to validate")
        viab_rop = full_support_check(m, o, rop, workers)
        if viab_rop.passed != full:
            return CheckResult(False, "positive-cone viability disagrees")
    return CheckResult(True, "arbitrage-free" if a else "arbitrage")


def _hedge_or_none(m, o, x):
    try:
        return superhedge_price(m, o, x)
    except UnboundedBelow:
        return None


def _check_duality(setup, payoffs):
    m, o = setup.market, setup.order
    poly = MartingalePolytope(m, o)
    empty = poly.is_empty()
    for x in payoffs:
        cert = _hedge_or_none(m, o, x)
        if empty:
            if cert is not None:
                return CheckResult(False, "finite price with an empty polytope")
            continue
        if cert is None:
            return CheckResult(False, "unbounded price with a nonempty polytope")
        sup = poly.support(x)[0]
        if sup != cert.price:
            return CheckResult(False, f"price {cert.price} != dual {sup}")
        problems = cert.verify(m, o)
        if problems:
            return CheckResult(False, "hedge certificate: " + "; ".join(problems))
        if not poly.contains(cert.dual):
            return CheckResult(False, "dual maximizer outside the polytope")
    return CheckResult(True, "polytope empty" if empty else f"{len(payoffs)} payoffs")


def _check_sublinear(setup, rng):
    m, o = setup.market, setup.order
    if MartingalePolytope(m, o).is_empty():
        return CheckResult(True, "skipped: polytope empty")

    def d(x):
        return superhedge_price(m, o, x).price

    x, y = _random_payoff(rng, m), _random_payoff(rng, m)
    lam = Fraction(rng.randint(1, 5), rng.randint(1, 3))
    c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    dx, dy = d(x), d(y)
    if d(tuple(a + b for a, b in zip(x, y))) > dx + dy:
        return CheckResult(False, "subadditivity fails")
    if d(tuple(lam * a for a in x)) != lam * dx:
        return CheckResult(False, "positive homogeneity fails")
    if d(tuple(a + c for a in x)) != dx + c:
        return CheckResult(False, "cash invariance fails")
    bump = _random_payoff(rng, m, 0, 2)
    if d(tuple(a + b for a, b in zip(x, bump))) < dx:
        return CheckResult(False, "monotonicity fails")
    for g in m.generators:
        v = d(tuple(a + b for a, b in zip(x, g.payoff)))
        if v > dx or (m.linear and v != dx):
            return CheckResult(False, "adding a net trade changed the price")
    return CheckResult(True)


def _check_negligible(setup, rng):
    m, o = setup.market, setup.order
    if MartingalePolytope(m, o).is_empty():
        return CheckResult(True, "skipped: polytope empty")
    for z in _negligibles(rng, setup, 3):
        price = superhedge_price(m, o, z).price
        if price != 0:
            return CheckResult(False, f"negligible claim priced at {price}")
    return CheckResult(True)


def _check_support(setup, rng, workers):
    m = setup.market
    subsets = [frozenset(range(m.n))]
    for _ in range(3):
        subsets.append(frozenset(w for w in range(m.n) if rng.random() < 0.6) or frozenset({0}))
    for a in subsets:
        res = support_set(m, None, a, workers)
        if not res.agrees:
            return CheckResult(False, f"recursion {sorted(res.final_set)} vs charging {sorted(res.charged_set)}")
        # splitting soundness
        current = set(a)
        for rec in res.records:
            pieces = [set(c) for c in rec.cells] + [set(rec.residual)]
            if set().union(*pieces) != current or sum(len(p) for p in pieces) != len(current):
                return CheckResult(False, f"split at t={rec.time} is not a partition")
            alive = set(current)
            for payoff, cell in zip(rec.strategies, rec.cells):
                if any(payoff[w] < 0 for w in alive) or any(payoff[w] <= 0 for w in cell):
                    return CheckResult(False, f"split strategy at t={rec.time} has the wrong sign pattern")
                alive -= set(cell)
            current = set(rec.residual)
        again = support_set(m, None, res.final_set, workers).final_set if res.final_set else frozenset()
        if again != res.final_set:
            return CheckResult(False, "support set is not idempotent")
    return CheckResult(True)


def _check_reduction(setup, payoffs, free_rop):
    m, o = setup.market, setup.order
    if not o.state_based:
        try:
            technical_reduction(m, o, payoffs[0])
        except OrderUnsupported:
            return CheckResult(True, "gated: expectation order")
        return CheckResult(False, "expectation order was not gated")
    if not free_rop:
        return CheckResult(True, "skipped: arbitrage present")
    for x in payoffs[:2]:
        rep = technical_reduction(m, o, x)
        if not rep.holds:
            return CheckResult(False, f"chain {rep.price} / {rep.restricted_price} / {rep.dual_value}")
    return CheckResult(True)


def _check_certificates(setup, rng, free_rop):
    m, o = setup.market, setup.order
    if not o.state_based:
        return CheckResult(True, "gated: expectation order")
    if free_rop:
        bat = ftap_battery(m, o)
        missing = [w for w, q in bat.items() if q is None]
        if missing:
            return CheckResult(False, f"no certificate for states {missing}")
        polar = o.polar_mask
        support = sorted(o.support)
        for _ in range(3):
            z = tuple(Fraction(-rng.randint(0, 2)) if w in polar else Fraction(0) for w in range(m.n))
            r = [Fraction(rng.randint(0, 2)) if w in o.support else Fraction(rng.randint(-2, 2)) for w in range(m.n)]
            r[rng.choice(support)] = Fraction(1)
            if ftap_certificates(m, o, z, r) is None:
                return CheckResult(False, "missing certificate for a random pair")
        return CheckResult(True)
    cert = find_arbitrage(m, o, default_relevance("rop", o))
    z = tuple(Fraction(-1) if w in o.polar_mask else Fraction(0) for w in range(m.n))
    if ftap_certificates(m, o, z, cert.payoff) is not None:
        return CheckResult(False, "certificate exists for an arbitrage payoff")
    return CheckResult(True, "arbitrage: no certificate, as expected")


def run_checks(setup: Setup, seed: int = 0, workers: int = 1) -> dict:
    rng = random.Random(seed * 7919 + 17)
    m, o = setup.market, setup.order
    payoffs = [_random_payoff(rng, m) for _ in range(5)]
    free_rop = None
    if o.state_based:
        free_rop = find_arbitrage(m, o, default_relevance("rop", o)) is None
    checks = {}
    checks["i_verdicts"] = _guard(lambda: _check_verdicts(setup, workers))
    checks["ii_duality"] = _guard(lambda: _check_duality(setup, payoffs))
    checks["iii_sublinearity"] = _guard(lambda: _check_sublinear(setup, rng))
    checks["iv_negligible"] = _guard(lambda: _check_negligible(setup, rng))
    checks["v_support"] = _guard(lambda: _check_support(setup, rng, workers))
    checks["vi_reduction"] = _guard(lambda: _check_reduction(setup, payoffs, free_rop))
    checks["vii_certificates"] = _guard(lambda: _check_certificates(setup, rng, free_rop))
    return checks


def equivalence_battery(doc: MarketSpecDocument, seed: int = 0, workers: int = 1,
                        shrink: bool = True) -> BatteryResult:
    setup = build_setup(doc)
    checks = run_checks(setup, seed, workers)
    result = BatteryResult(seed, checks)
    try:
        result.arbitrage_free = find_arbitrage(setup.market, setup.order, setup.relevance) is None
    except KnightmarkError:
        pass
    if not result.passed and shrink:
        failing = set(result.failures())
        small, trace = shrink_document(doc, failing, seed)
        result.counterexample = document_to_json(small)
        result.shrink_trace = trace
    return result


# -- shrinking ------------------------------------------------------------

def _fails(doc, failing, seed) -> bool:
    try:
        setup = build_setup(doc)
    except KnightmarkError:
        return False
    checks = run_checks(setup, seed)
    return any(not checks[name].passed for name in failing)


def _renormalize(p):
    total = sum(p, Fraction(0))
    if total == 0:
        return None
    return tuple(x / total for x in p)


def _drop_state(doc: MarketSpecDocument, w: int) -> Optional[MarketSpecDocument]:
    if len(doc.states) <= 1:
        return None
    name = doc.states[w]
    states = tuple(s for s in doc.states if s != name)
    filt = tuple(tuple(tuple(s for s in c if s != name) for c in part if [s for s in c if s != name])
                 for part in doc.filtration)
    assets = tuple(AssetDoc(a.name, tuple(
        tuple(v for i, v in enumerate(row) if i != w) if isinstance(row, tuple) and len(row) == len(doc.states) else row
        for row in a.prices)) for a in doc.assets)

    def cut(vecs):
        if vecs is None:
            return None
        return tuple(tuple(v for i, v in enumerate(g) if i != w) for g in vecs)

    order = doc.order
    if order.priors is not None:
        kept, weights = [], []
        for i, p in enumerate(order.priors):
            q = _renormalize(tuple(v for j, v in enumerate(p) if j != w))
            if q is not None:
                kept.append(q)
                if order.mixture_weights is not None:
                    weights.append(order.mixture_weights[i])
        if not kept:
            return None
        mw = _renormalize(tuple(weights)) if order.mixture_weights is not None else None
        if order.mixture_weights is not None and mw is None:
            return None
        order = OrderDoc(order.kind, tuple(kept), mw)
    cone = replace(doc.cone, generators=cut(doc.cone.generators))
    rel = doc.relevance
    if rel.generators is not None:
        rel = RelevanceDoc(rel.preset, cut(rel.generators))
    return replace(doc, states=states, filtration=filt, assets=assets, order=order, cone=cone, relevance=rel)


def _drop_time(doc: MarketSpecDocument, t: int) -> Optional[MarketSpecDocument]:
    if len(doc.filtration) <= 2 or t == 0:
        return None
    filt = tuple(p for i, p in enumerate(doc.filtration) if i != t)
    assets = tuple(AssetDoc(a.name, tuple(r for i, r in enumerate(a.prices) if i != t)) for a in doc.assets)
    cone = doc.cone
    if cone.times is not None:
        return None
    return replace(doc, filtration=filt, assets=assets, cone=cone)


def _drop_asset(doc: MarketSpecDocument, j: int) -> Optional[MarketSpecDocument]:
    if len(doc.assets) <= 1 or doc.cone.generators is not None:
        return None
    name = doc.assets[j].name
    if doc.numeraire == name:
        return None
    cone = doc.cone
    if cone.no_short:
        cone = replace(cone, no_short=tuple(a for a in cone.no_short if a != name))
    return replace(doc, assets=tuple(a for i, a in enumerate(doc.assets) if i != j), cone=cone)


def shrink_document(doc: MarketSpecDocument, failing, seed: int = 0):
    """Greedy shrink: states, then dates, then assets, keeping a failure alive."""
    trace = []
    for label, dropper, count in (
        ("state", _drop_state, lambda d: len(d.states)),
        ("time", _drop_time, lambda d: len(d.filtration)),
        ("asset", _drop_asset, lambda d: len(d.assets)),
    ):
        progress = True
        while progress:
            progress = False
            for i in range(count(doc) - 1, -1, -1):
                smaller = dropper(doc, i)
                if smaller is not None and _fails(smaller, failing, seed):
                    trace.append(f"dropped {label} {i}")
                    doc = smaller
                    progress = True
                    break
    return doc, trace


def _one(args):
    cfg, seed = args
    doc = generate_market(cfg, seed)
    res = equivalence_battery(doc, seed)
    return res


def run_fuzz(count: int, seed: int = 0, workers: int = 1, cfg: Optional[GeneratorConfig] = None) -> list:
    """Battery over ``count`` markets with seeds ``seed .. seed+count-1``; input order kept."""
    cfg = cfg or GeneratorConfig(seed=seed)
    jobs = [(cfg, seed + i) for i in range(count)]
    if workers <= 1:
        return [_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one, jobs, chunksize=4))
