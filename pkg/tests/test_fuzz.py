import pytest

from knightmark import fuzz
from knightmark.fuzz import (
    CHECKS, CheckResult, GeneratorConfig, equivalence_battery, generate_market, run_fuzz, run_checks,
)
from knightmark.io import build_setup, load_spec


def test_generator_is_deterministic():
    cfg = GeneratorConfig()
    assert generate_market(cfg, 17) == generate_market(cfg, 17)
    assert generate_market(cfg, 17) != generate_market(cfg, 18)


def test_generator_respects_bounds():
    cfg = GeneratorConfig(max_states=2, max_times=1, max_assets=1)
    for seed in range(30):
        doc = generate_market(cfg, seed)
        assert len(doc.states) <= 2 and doc.horizon == 1 and len(doc.assets) == 1
        build_setup(doc)


def test_generated_markets_validate():
    cfg = GeneratorConfig()
    for seed in range(40):
        s = build_setup(generate_market(cfg, seed))
        assert 2 <= s.market.n <= 12 and 1 <= s.market.horizon <= 3


@pytest.mark.parametrize("name", ["binomial", "kreps", "example45", "example34", "onetwo", "atom"])
def test_battery_on_fixtures(name):
    res = equivalence_battery(load_spec(name), seed=3)
    assert res.passed, {k: v.detail for k, v in res.checks.items() if not v.passed}
    assert tuple(res.checks) == CHECKS


def test_golden_seed_zero():
    first = run_fuzz(3, seed=0)
    again = run_fuzz(3, seed=0)
    assert [r.seed for r in first] == [0, 1, 2]
    assert [(r.passed, r.arbitrage_free) for r in first] == [(r.passed, r.arbitrage_free) for r in again]
    assert all(r.passed for r in first)


def test_parallel_matches_sequential():
    seq = run_fuzz(6, seed=100)
    par = run_fuzz(6, seed=100, workers=2)
    assert [(r.seed, r.passed, r.arbitrage_free) for r in seq] == \
        [(r.seed, r.passed, r.arbitrage_free) for r in par]


def test_shrinking_on_injected_failure(monkeypatch):
    real = run_checks

    def broken(setup, seed=0, workers=1):
        out = real(setup, seed, workers)
        if setup.market.n >= 3:
            out["v_support"] = CheckResult(False, "injected")
        return out

    monkeypatch.setattr(fuzz, "run_checks", broken)
    doc = next(d for d in (generate_market(GeneratorConfig(), s) for s in range(50))
               if len(d.states) >= 6 and d.horizon >= 2)
    res = equivalence_battery(doc, seed=1)
    assert res.failures() == ["v_support"]
    small = res.counterexample
    assert len(small["states"]) == 3
    assert len(small["filtration"]) == 2
    assert res.shrink_trace and all(t.startswith("dropped") for t in res.shrink_trace)
