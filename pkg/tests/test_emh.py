import random
from fractions import Fraction as F

import pytest

from knightmark.emh import (
    knightian_strong, knightian_weak, mean_ambiguity_free_basis, smooth_emh, strong_emh, weak_emh,
)
from knightmark.errors import EmptyPolytope
from knightmark.fuzz import GeneratorConfig, generate_market
from knightmark.io import build_setup
from knightmark.rational import rank

from helpers import one_period


def test_binomial_strong_and_weak(binomial):
    m = binomial.market
    assert strong_emh(m, [F(1, 3), F(2, 3)]).verdict
    off = strong_emh(m, [F(1, 2), F(1, 2)])
    assert not off.verdict
    weak = weak_emh(m, [F(1, 2), F(1, 2)])
    assert weak.verdict and weak.witnesses["density"] == (F(2, 3), F(4, 3))
    assert weak.verify(m) == []


def test_weak_fails_on_flat_then_up(onetwo):
    rep = weak_emh(onetwo.market, [F(1, 3)] * 3)
    assert not rep.verdict and rep.witnesses["uncharged"] == (2,)


def test_example45_knightian(ex45):
    priors = ex45.document.order.priors
    rep = knightian_strong(ex45.market, priors)
    assert rep.verdict and rep.witnesses["vertices"] == ((F(1, 4),) * 4,)
    assert rep.witnesses["hull_weights"][0] == (F(1, 2), F(1, 2))
    assert rep.witnesses["restricted_agreement"]
    assert not rep.witnesses["per_generator_inclusion"]
    basis = rep.witnesses["mean_ambiguity_free_basis"]
    assert len(basis) == 3 and rank([(1, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)] + list(basis)) == 3
    assert rep.verify(ex45.market) == []


def test_example45_strong_fails_for_each_prior(ex45):
    for p in ex45.document.order.priors:
        assert not strong_emh(ex45.market, p).verdict


def test_knightian_weak_onetwo(onetwo):
    assert not knightian_weak(onetwo.market, [[F(1, 3)] * 3]).verdict
    rep = knightian_weak(onetwo.market, [[F(1, 2), F(1, 2), 0]])
    assert rep.verdict and rep.witnesses["support_matches"]


def test_knightian_strong_empty_raises():
    s = one_period("ab", 1, [2, 3])
    with pytest.raises(EmptyPolytope):
        knightian_strong(s.market, [[F(1, 2), F(1, 2)]])


def test_smooth_is_weak_of_mixture(binomial):
    priors = [[F(1, 4), F(3, 4)], [F(3, 4), F(1, 4)]]
    rep = smooth_emh(binomial.market, [F(1, 2), F(1, 2)], priors)
    assert rep.witnesses["mixture"] == (F(1, 2), F(1, 2))
    assert rep.verdict == weak_emh(binomial.market, [F(1, 2), F(1, 2)]).verdict
    assert rep.witnesses["state_price_density"] == (F(2, 3), F(4, 3))


def test_mean_ambiguity_free_basis_single_prior():
    assert len(mean_ambiguity_free_basis([(F(1, 2), F(1, 2))])) == 2


def _prior(rng, n):
    w = [rng.randint(0, 3) for _ in range(n)]
    if not any(w):
        w[0] = 1
    t = sum(w)
    return tuple(F(v, t) for v in w)


def test_hierarchy_and_singletons(seed):
    rng = random.Random(seed)
    cfg = GeneratorConfig(max_states=5, max_times=2, max_assets=2)
    for i in range(25):
        m = build_setup(generate_market(cfg, seed + i)).market
        p = _prior(rng, m.n)
        strong, weak = strong_emh(m, p), weak_emh(m, p)
        if strong.verdict:
            assert weak.verdict
        assert knightian_weak(m, [p]).verdict == weak.verdict
        try:
            ks = knightian_strong(m, [p]).verdict
        except EmptyPolytope:
            ks = False
        assert ks == strong.verdict
