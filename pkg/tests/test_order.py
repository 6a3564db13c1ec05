from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from knightmark.errors import EmptyPriorSet, InvalidRelevance, NonProbabilityVector
from knightmark.order import (
    Classification, build_order, classify, custom_relevance, default_relevance, dominates,
)

H = F(1, 2)


def test_quasi_sure_support():
    o = build_order("quasi_sure", 3, [[H, H, 0]])
    assert o.polar_mask == {2}
    assert o.test_matrix == ((1, 0, 0), (0, 1, 0))


def test_expectation_rows():
    o = build_order("expectation", 4, [[F(1, 6), F(1, 3), F(1, 4), F(1, 4)], [F(1, 3), F(1, 6), F(1, 4), F(1, 4)]])
    assert o.rows == 2
    assert o.test_matrix[0] == (F(1, 6), F(1, 3), F(1, 4), F(1, 4))
    assert not o.state_based


def test_smooth_mixture():
    o = build_order("smooth", 2, [[1, 0], [0, 1]], [H, H])
    assert o.mixture == (H, H)
    assert o.test_matrix == ((1, 0), (0, 1))


def test_errors():
    with pytest.raises(EmptyPriorSet):
        build_order("quasi_sure", 2, [])
    with pytest.raises(NonProbabilityVector):
        build_order("quasi_sure", 2, [[H, H + 1]])
    with pytest.raises(NonProbabilityVector):
        build_order("expectation", 2, [[F(3, 2), -H]])


def test_classify_examples():
    qs = build_order("quasi_sure", 3, [[H, H, 0]])
    assert classify((0, 0, 0), qs) is Classification.NEGLIGIBLE
    assert classify((0, 0, 1), qs) is Classification.NEGLIGIBLE
    ex = build_order("expectation", 4, [[F(1, 6), F(1, 3), F(1, 4), F(1, 4)], [F(1, 3), F(1, 6), F(1, 4), F(1, 4)]])
    # 1/6 - 1/3 < 0 but 1/3 - 1/6 > 0
    assert classify((1, -1, 0, 0), ex) is Classification.NEITHER
    assert classify((1, 0, 0, 0), ex) is Classification.POSITIVE
    assert classify((-1, 0, 0, 0), ex) is Classification.NEGATIVE_OF_POSITIVE


def test_dominates_examples():
    pw = build_order("pointwise", 2)
    assert dominates((0, 0), (1, 0), pw)
    assert dominates((1, 2), (1, 2), pw)
    qs = build_order("quasi_sure", 3, [[H, H, 0]])
    assert dominates((0, 0, 5), (0, 0, 0), qs)


def test_default_relevance():
    pw = build_order("pointwise", 3)
    assert default_relevance("rop", pw).payoffs == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert default_relevance("ropen", pw).payoffs == default_relevance("rop", pw).payoffs
    assert default_relevance("runiform", pw).payoffs == ((1, 1, 1),)
    assert default_relevance("rplus", pw).everywhere_positive
    qs = build_order("quasi_sure", 3, [[H, H, 0]])
    assert default_relevance("rop", qs).payoffs == ((1, 0, 0), (0, 1, 0))


def test_expectation_relevance_targets_rows():
    ex = build_order("expectation", 4, [[F(1, 6), F(1, 3), F(1, 4), F(1, 4)], [F(1, 3), F(1, 6), F(1, 4), F(1, 4)]])
    rel = default_relevance("rop", ex)
    assert rel.targets == ((1, 0), (0, 1))
    for g, t in zip(rel.payoffs, rel.targets):
        assert ex.apply(g) == t


def test_custom_relevance_must_be_positive():
    pw = build_order("pointwise", 2)
    with pytest.raises(InvalidRelevance):
        custom_relevance([[1, -1]], pw)
    assert custom_relevance([[1, 0]], pw).targets == ((1, 0),)


# -- properties -------------------------------------------------------------

rat = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def qs_order(draw):
    n = draw(st.integers(2, 5))
    support = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n))
    p = [F(1, len(support)) if w in support else F(0) for w in range(n)]
    return build_order("quasi_sure", n, [p])


@st.composite
def negligible(draw, order):
    return tuple(draw(rat) if w in order.polar_mask else F(0) for w in range(order.n))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_sandwich(data):
    o = data.draw(qs_order())
    lo, hi = data.draw(negligible(o)), data.draw(negligible(o))
    # any Z squeezed between two negligibles on the support is negligible
    z = tuple(data.draw(rat) if w in o.polar_mask else F(0) for w in range(o.n))
    if dominates(lo, z, o) and dominates(z, hi, o):
        assert classify(z, o) is Classification.NEGLIGIBLE


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_stability_and_lattice(data):
    o = data.draw(qs_order())
    z1, z2 = data.draw(negligible(o)), data.draw(negligible(o))
    h = tuple(data.draw(rat) for _ in range(o.n))
    assert classify(tuple(a * b for a, b in zip(z1, h)), o) is Classification.NEGLIGIBLE
    assert classify(tuple(min(a, b) for a, b in zip(z1, z2)), o) is Classification.NEGLIGIBLE
    assert classify(tuple(max(a, b) for a, b in zip(z1, z2)), o) is Classification.NEGLIGIBLE


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_pointwise_domination_is_universal(data):
    n = data.draw(st.integers(2, 4))
    x = tuple(data.draw(rat) for _ in range(n))
    y = tuple(a + abs(data.draw(rat)) for a in x)
    p = [F(1, n)] * n
    q = [F(1)] + [F(0)] * (n - 1)
    for o in (build_order("pointwise", n), build_order("quasi_sure", n, [q]),
              build_order("expectation", n, [p, q]), build_order("smooth", n, [p, q], [H, H])):
        assert dominates(x, y, o)
