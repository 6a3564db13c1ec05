"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import os
import random
import sys
import time
from fractions import Fraction as F
from functools import lru_cache

import pytest

from knightmark.arbitrage import find_arbitrage, verify_arbitrage
from knightmark.document import AssetDoc, MarketSpecDocument
from knightmark.emh import knightian_strong, knightian_weak, smooth_emh, strong_emh, weak_emh
from knightmark.errors import EmptyPolytope
from knightmark.fuzz import GeneratorConfig, generate_market, run_fuzz
from knightmark.io import build_setup, load
from knightmark.rational import rank
from knightmark.superhedge import MartingalePolytope, full_support_check

FUZZ_COUNT = 500
FUZZ_SEED = 0
RESULTS = {}
INFO = {}


def _record(num, title, problems, elapsed, limit=None):
    slow = limit is not None and elapsed >= limit
    if slow:
        problems = problems + [f"runtime {elapsed:.2f}s exceeds {limit}s"]
    ok = not problems
    budget = f" / limit {limit}s" if limit is not None else ""
    line = f"criterion {num} {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.2f}s{budget})"
    if num in INFO:
        line += f"  [{INFO[num]}]"
    if problems:
        line += "  " + "; ".join(problems[:3])
    RESULTS[num] = line
    print(line)
    return ok, problems


def _timed(fn):
    t0 = time.perf_counter()
    problems = fn()
    return problems, time.perf_counter() - t0


# -- 1 ---------------------------------------------------------------------

def criterion_1():
    s = load("example45")
    problems = []
    poly = MartingalePolytope(s.market, s.order)
    quarter = (F(1, 4),) * 4
    if poly.vertices() != [quarter] or poly.is_singleton() != quarter:
        problems.append(f"polytope {poly.vertices()}")
    rep = knightian_strong(s.market, s.document.order.priors)
    if not rep.verdict:
        problems.append("knightian_strong verdict false")
    basis = list(rep.witnesses["mean_ambiguity_free_basis"])
    # the two priors differ only on the first two states, by opposite amounts
    expected = [(1, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    if len(basis) != 3 or rank(expected + basis) != 3:
        problems.append(f"H_M basis {basis}")
    return problems


# -- 2 ---------------------------------------------------------------------

def _atom(u, d, r):
    doc = MarketSpecDocument(("up", "down"), ((("up", "down"),), (("up",), ("down",))),
                             (AssetDoc("B", (F(1), (1 + r, 1 + r))), AssetDoc("S", (F(1), (u, d)))),
                             numeraire="B")
    return build_setup(doc)


def criterion_2(seed=FUZZ_SEED):
    rng = random.Random(seed)
    problems, free, arb = [], 0, 0
    for _ in range(100):
        d = F(rng.randint(1, 150), 100)
        u = d + F(rng.randint(1, 100), 100)
        r = F(rng.randint(-30, 120), 100)
        s = _atom(u, d, r)
        cert = find_arbitrage(s.market, s.order, s.relevance)
        if d < 1 + r < u:
            free += 1
            p = (1 + r - d) / (u - d)
            q = MartingalePolytope(s.market, s.order).is_singleton()
            if q != (p, 1 - p) or cert is not None:
                problems.append(f"(u,d,r)=({u},{d},{r}): measure {q}, expected {(p, 1 - p)}")
        else:
            arb += 1
            if cert is None or verify_arbitrage(s.market, s.order, s.relevance, cert):
                problems.append(f"(u,d,r)=({u},{d},{r}): no valid certificate")
    if not free or not arb:
        problems.append(f"degenerate sample: {free} viable, {arb} with arbitrage")
    return problems


# -- 3 ---------------------------------------------------------------------

def criterion_3():
    s = load("kreps")
    m, o, rel = s.market, s.order, s.relevance
    problems = []
    cert = find_arbitrage(m, o, rel)
    if cert is None:
        return ["no arbitrage certificate"]
    indicator = (0, 1, 1)
    c = next(v for v in cert.payoff if v != 0)
    if tuple(cert.payoff) != tuple(c * v for v in indicator) or c <= 0:
        problems.append(f"certificate payoff {cert.payoff}")
    if verify_arbitrage(m, o, rel, cert):
        problems.append("certificate does not verify")
    poly = MartingalePolytope(m, o)
    # the only martingale functional sits on the flat state and cannot
    # charge any relevant claim
    if poly.vertices() != [(1, 0, 0)]:
        problems.append(f"polytope {poly.vertices()}")
    best = poly.support(indicator)
    if best is not None and best[0] > 0:
        problems.append("some martingale functional charges 1_{w>0}")
    if full_support_check(m, o, rel).passed:
        problems.append("viability check passed")
    return problems


# -- 4 ---------------------------------------------------------------------

def criterion_4():
    s = load("example34")
    m, o = s.market, s.order
    problems = []
    poly = MartingalePolytope(m, o)
    verts = set(poly.vertices())
    if verts != {(F(1, 2), 0, F(1, 2)), (0, 1, 0)}:
        problems.append(f"vertices {sorted(verts)}")
    if not full_support_check(m, o, s.relevance).passed:
        problems.append("full-support check failed")
    for w in range(3):  # states 0, 1/2, 1; the mirror of w is 1 - w
        q = [F(0)] * 3
        q[w] += F(1, 2)
        q[2 - w] += F(1, 2)
        if not poly.contains(tuple(q)) or q[w] <= 0:
            problems.append(f"charging measure for state {w} invalid")
    return problems


# -- 5, 6, 7 ---------------------------------------------------------------

@lru_cache(maxsize=1)
def fuzz_run():
    t0 = time.perf_counter()
    results = run_fuzz(FUZZ_COUNT, seed=FUZZ_SEED, workers=os.cpu_count() or 1,
                       cfg=GeneratorConfig(max_states=12, max_times=3, max_assets=2, seed=FUZZ_SEED))
    return results, time.perf_counter() - t0


def criterion_5():
    results, _ = fuzz_run()
    bad = [r for r in results if not r.passed]
    free = sum(1 for r in results if r.arbitrage_free)
    problems = [f"seed {r.seed} failed {r.failures()}: {r.counterexample}" for r in bad]
    if len(results) != FUZZ_COUNT:
        problems.append(f"only {len(results)} markets ran")
    INFO[5] = f"{len(results)} markets, {free} arbitrage-free, {len(bad)} failures"
    return problems


def criterion_6():
    results, _ = fuzz_run()
    free = [r for r in results if r.arbitrage_free]
    problems = [f"seed {r.seed}: {r.checks['ii_duality'].detail}" for r in free
                if not r.checks["ii_duality"].passed]
    if not free:
        problems.append("no arbitrage-free markets were generated")
    INFO[6] = f"{len(free)} markets x 5 payoffs, timed within criterion 5"
    return problems


def criterion_7():
    results, _ = fuzz_run()
    INFO[7] = f"{len(results)} markets x 4 subsets, timed within criterion 5"
    return [f"seed {r.seed}: {r.checks['v_support'].detail}" for r in results
            if not r.checks["v_support"].passed]


# -- 8 ---------------------------------------------------------------------

def _prior(rng, n):
    w = [rng.randint(0, 4) for _ in range(n)]
    if not any(w):
        w[rng.randrange(n)] = 1
    total = sum(w)
    return tuple(F(v, total) for v in w)


def criterion_8(seed=FUZZ_SEED):
    rng = random.Random(seed + 8)
    cfg = GeneratorConfig(max_states=8, max_times=3, max_assets=2)
    problems, counts = [], [0, 0]
    for i in range(100):
        m = build_setup(generate_market(cfg, 10_000 + i)).market
        p = _prior(rng, m.n)
        strong, weak = strong_emh(m, p), weak_emh(m, p)
        if strong.verdict and not weak.verdict:
            problems.append(f"market {i}: strong holds but weak fails")
        try:
            ks = knightian_strong(m, [p]).verdict
        except EmptyPolytope:
            ks = False
        kw = knightian_weak(m, [p]).verdict
        sm = smooth_emh(m, [1], [p]).verdict
        counts[0] += strong.verdict
        counts[1] += weak.verdict
        if (ks, kw, sm) != (strong.verdict, weak.verdict, weak.verdict):
            problems.append(f"market {i}: singleton variants {(ks, kw, sm)} vs {(strong.verdict, weak.verdict)}")
        for rep in (strong, weak):
            problems += [f"market {i}: {e}" for e in rep.verify(m)]
    INFO[8] = f"strong held {counts[0]}x, weak held {counts[1]}x"
    return problems


CRITERIA = [
    (1, "two-prior expectation market: singleton polytope and H_M", criterion_1, 1.0),
    (2, "atom of finance: 100 random (u, d, r)", criterion_2, 5.0),
    (3, "Kreps market certificate and viability", criterion_3, 1.0),
    (4, "three-state discretized market: vertices and charges", criterion_4, 1.0),
    (5, f"equivalence battery on {FUZZ_COUNT} markets", criterion_5, 600.0),
    (6, "duality stress on arbitrage-free fuzz markets", criterion_6, None),
    (7, "support recursion vs charging LPs", criterion_7, None),
    (8, "EMH hierarchy on 100 markets", criterion_8, None),
]


def _run(num):
    _, title, fn, limit = CRITERIA[num - 1]
    if num == 5:
        _, elapsed = fuzz_run()
        problems, _ = _timed(fn)
    else:
        problems, elapsed = _timed(fn)
    return _record(num, title, problems, elapsed, limit)


@pytest.mark.parametrize("num", [1, 2, 3, 4])
def test_worked_examples(num):
    ok, problems = _run(num)
    assert ok, problems


@pytest.mark.slow
@pytest.mark.parametrize("num", [5, 6, 7])
def test_fuzz_criteria(num):
    ok, problems = _run(num)
    assert ok, problems


def test_emh_hierarchy():
    ok, problems = _run(8)
    assert ok, problems


if __name__ == "__main__":
    outcomes = [_run(n)[0] for n in range(1, 9)]
    sys.exit(0 if all(outcomes) else 1)
