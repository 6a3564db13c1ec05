from fractions import Fraction as F

import pytest

from knightmark.arbitrage import check_nflvr, find_arbitrage, find_one_step_arbitrage, verify_arbitrage
from knightmark.document import AssetDoc, ConeDoc, MarketSpecDocument, OrderDoc, RelevanceDoc
from knightmark.errors import OrderUnsupported
from knightmark.io import build_setup

from helpers import one_period


def test_kreps_certificate(kreps):
    cert = find_arbitrage(kreps.market, kreps.order, kreps.relevance)
    assert cert is not None
    assert cert.payoff == (0, 1, 1)
    assert verify_arbitrage(kreps.market, kreps.order, kreps.relevance, cert) == []


def test_binomial_none(binomial):
    assert find_arbitrage(binomial.market, binomial.order, binomial.relevance) is None


def test_single_asset_up_only():
    s = one_period("ab", 1, [1, 2])
    cert = find_arbitrage(s.market, s.order, s.relevance)
    assert cert.payoff == (0, 1)


def test_one_step_kreps_and_binomial(kreps, binomial):
    res = find_one_step_arbitrage(kreps.market, kreps.order)
    assert res.time == 1 and res.strategy == (1,)
    assert find_one_step_arbitrage(binomial.market, binomial.order) is None


def _two_step():
    names = ("a", "b", "c", "d")
    filt = ((names,), (("a", "b"), ("c", "d")), tuple((s,) for s in names))
    prices = (F(3, 2), (2, 2, 1, 1), (3, 1, 1, 2))
    doc = MarketSpecDocument(names, filt, (AssetDoc("S", prices),))
    return build_setup(doc)


def test_one_step_finds_second_period():
    s = _two_step()
    res = find_one_step_arbitrage(s.market, s.order)
    assert res.time == 2
    assert res.certificate.payoff == (0, 0, 0, 1)
    assert find_arbitrage(s.market, s.order, s.relevance) is not None
    assert verify_arbitrage(s.market, s.order, s.relevance, res.certificate) == []


def test_one_step_gated(ex45):
    with pytest.raises(OrderUnsupported):
        find_one_step_arbitrage(ex45.market, ex45.order)


def test_nflvr_examples(ex45, kreps):
    v = check_nflvr(ex45.market, ex45.order, ex45.relevance)
    assert v.status == "StronglyFree" and v.backing == "polyhedral-closedness"
    k = check_nflvr(kreps.market, kreps.order, kreps.relevance)
    assert k.status == "FreeLunch" and k.backing == "attainment-equivalence-lattice"
    assert all(p is None or p <= 0 for p in (k.prices[1],))


def test_empty_cone_is_free():
    names = ("a", "b", "c")
    doc = MarketSpecDocument(names, ((names,), tuple((s,) for s in names)), (),
                             ConeDoc("linear"), OrderDoc("pointwise"), RelevanceDoc("rop"))
    s = build_setup(doc)
    assert check_nflvr(s.market, s.order, s.relevance).strongly_free


def test_certificate_scaling_stays_valid(kreps):
    cert = find_arbitrage(kreps.market, kreps.order, kreps.relevance)
    for c in (F(1, 3), 1, 5):
        assert verify_arbitrage(kreps.market, kreps.order, kreps.relevance, cert.scaled(c)) == []


def test_tampered_certificate_rejected(kreps):
    cert = find_arbitrage(kreps.market, kreps.order, kreps.relevance)
    bad = type(cert)((F(-1),), (0, -1, -1), cert.relevant_index, cert.relevant, cert.witness_rows)
    assert verify_arbitrage(kreps.market, kreps.order, kreps.relevance, bad)


def test_quasi_sure_polar_state_creates_arbitrage():
    # S moves (1 -> 2, 0, 1); ignoring the down state leaves a sure gain
    s = one_period("abc", 1, [2, 0, 1], kind="quasi_sure", priors=[[F(1, 2), 0, F(1, 2)]])
    cert = find_arbitrage(s.market, s.order, s.relevance)
    assert cert is not None and cert.payoff[0] > 0


def test_cone_mode_short_sale_ban():
    # selling is the only way to profit; banning it removes the arbitrage
    s = one_period("ab", 2, [1, 1], mode="cone")
    assert find_arbitrage(s.market, s.order, s.relevance) is not None
    doc = s.document
    banned = build_setup(type(doc)(doc.states, doc.filtration, doc.assets,
                                   ConeDoc("cone", None, ("S",)), doc.order, doc.relevance))
    assert find_arbitrage(banned.market, banned.order, banned.relevance) is None
