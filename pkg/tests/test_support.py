import warnings
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from knightmark.errors import ArbitragePresent, BadR, BadZ, EmptySupport, OrderUnsupported
from knightmark.fuzz import GeneratorConfig, generate_market
from knightmark.io import build_setup
from knightmark.support import (
    SplittingWarning, conditional_splitting, ftap_battery, ftap_certificates, support_set,
    superhedge_on_set, technical_reduction,
)

from helpers import float_charge_max, one_period


def oracle_support(market, states):
    return frozenset(w for w in states
                     if (v := float_charge_max(market, states, w)) is not None and v > 1e-9)


def test_onetwo_splitting(onetwo):
    rec = conditional_splitting(onetwo.market, 1, {0, 1, 2})
    assert rec.beta == 1 and rec.cells == ((2,),) and rec.residual == (0, 1)
    assert rec.warning is None


def test_onetwo_support(onetwo):
    res = support_set(onetwo.market, onetwo.order, {0, 2})
    assert res.final_set == {0} and res.agrees
    assert support_set(onetwo.market, None, {0, 1, 2}).final_set == {0, 1}


def test_binomial_full(binomial):
    assert support_set(binomial.market, None, {0, 1}).final_set == {0, 1}
    assert support_set(binomial.market, None, {0}).final_set == frozenset()


def test_superhedge_on_set(onetwo, binomial):
    price, _, q = superhedge_on_set(onetwo.market, [0, 0, 100], {0, 1, 2})
    assert price == 0 and q[2] == 0
    price, _, q = superhedge_on_set(binomial.market, [1, 0], {0, 1})
    assert price == F(1, 3) and q == (F(1, 3), F(2, 3))
    with pytest.raises(EmptySupport):
        superhedge_on_set(binomial.market, [1, 0], {1})


def test_expectation_gate(ex45):
    with pytest.raises(OrderUnsupported):
        support_set(ex45.market, ex45.order, {0, 1})
    with pytest.raises(OrderUnsupported):
        technical_reduction(ex45.market, ex45.order, [1, 0, 0, 0])
    with pytest.raises(OrderUnsupported):
        ftap_certificates(ex45.market, ex45.order, [0] * 4, [1, 0, 0, 0])


def test_splitting_warning_with_many_moves():
    # one asset, four states: up, down, and two flat states that never split
    s = one_period("abcd", 1, [2, 2, 1, 0])
    with warnings.catch_warnings():
        warnings.simplefilter("error", SplittingWarning)
        rec = conditional_splitting(s.market, 1, {0, 1, 2})
    assert rec.beta == 1 and set(rec.residual) == {2}


def _random_setup(seed):
    return build_setup(generate_market(GeneratorConfig(max_states=6, max_times=2, max_assets=2), seed))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_support_properties(seed, data):
    s = _random_setup(seed)
    n = s.market.n
    a = frozenset(data.draw(st.sets(st.integers(0, n - 1), min_size=1)))
    b = a | frozenset(data.draw(st.sets(st.integers(0, n - 1))))
    sa = support_set(s.market, None, a)
    sb = support_set(s.market, None, b).final_set
    assert sa.final_set <= a
    assert sa.final_set <= sb  # monotone
    assert support_set(s.market, None, sa.final_set).final_set == sa.final_set  # idempotent
    assert sa.agrees
    assert sa.final_set == oracle_support(s.market, a)


def test_reduction_binomial(binomial):
    rep = technical_reduction(binomial.market, binomial.order, [1, 0])
    assert rep.holds and rep.price == F(1, 3)


def test_reduction_quasi_sure_polar():
    s = one_period("abc", 1, [2, 0, 1], kind="quasi_sure", priors=[[F(1, 3), F(2, 3), 0]])
    rep = technical_reduction(s.market, s.order, [0, 0, 5])
    assert rep.holds and rep.price == 0
    assert rep.zero_set == {0, 1} and rep.support == {0, 1}
    assert rep.residual == (0, 0, -5)


def test_reduction_refuses_arbitrage(kreps):
    with pytest.raises(ArbitragePresent):
        technical_reduction(kreps.market, kreps.order, [1, 0, 0])


def test_ftap_examples(binomial, kreps):
    assert ftap_certificates(binomial.market, binomial.order, [0, 0], [1, 0]) == (F(1, 3), F(2, 3))
    s = one_period("abc", 1, [2, 0, 1], kind="quasi_sure", priors=[[F(1, 3), F(2, 3), 0]])
    q = ftap_certificates(s.market, s.order, [0, 0, -1], [1, 0, 0])
    assert q[2] == 0 and q[0] > 0
    bat = ftap_battery(kreps.market, kreps.order)
    assert bat[0] == (1, 0, 0) and bat[1] is None and bat[2] is None


def test_ftap_rejects_bad_inputs(binomial):
    with pytest.raises(BadZ):
        ftap_certificates(binomial.market, binomial.order, [-1, 0], [1, 0])
    with pytest.raises(BadZ):
        ftap_certificates(binomial.market, binomial.order, [1, 0], [1, 0])
    with pytest.raises(BadR):
        ftap_certificates(binomial.market, binomial.order, [0, 0], [0, 0])
