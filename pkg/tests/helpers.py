"""Small builders and an independent floating-point oracle for tests."""

from fractions import Fraction as F

import numpy as np
from scipy.optimize import linprog

from knightmark.document import AssetDoc, ConeDoc, MarketSpecDocument, OrderDoc, RelevanceDoc
from knightmark.io import build_setup


def one_period(states, s0, s1, kind="pointwise", priors=None, weights=None, relevance="rop", mode="linear"):
    names = tuple(states)
    doc = MarketSpecDocument(
        names, ((names,), tuple((s,) for s in names)),
        (AssetDoc("S", (F(s0), tuple(F(v) for v in s1))),),
        ConeDoc(mode), OrderDoc(kind, priors, weights), RelevanceDoc(relevance))
    return build_setup(doc)


def float_superhedge(market, order, x):
    """min c s.t. c L1 + L G h >= L x with scipy's HiGHS; None if unbounded."""
    L = np.array([[float(v) for v in r] for r in order.test_matrix])
    G = np.array([[float(v) for v in g.payoff] for g in market.generators]).T.reshape(market.n, -1)
    ng = G.shape[1]
    A = np.hstack([L.sum(axis=1, keepdims=True), L @ G])
    b = L @ np.array([float(v) for v in x])
    hb = (None, None) if market.linear else (0, None)
    res = linprog(np.r_[1.0, np.zeros(ng)], A_ub=-A, b_ub=-b, bounds=[(None, None)] + [hb] * ng,
                  method="highs")
    if res.status == 3:
        return None
    assert res.status == 0
    return res.fun


def float_charge_max(market, states, target):
    """max q_target over martingale measures supported in ``states`` (pointwise)."""
    idx = sorted(states)
    k = len(idx)
    rows = [[1.0] * k] + [[float(g.payoff[w]) for w in idx] for g in market.generators]
    rhs = [1.0] + [0.0] * len(market.generators)
    c = np.array([-1.0 if w == target else 0.0 for w in idx])
    if market.linear:
        res = linprog(c, A_eq=rows, b_eq=rhs, bounds=[(0, None)] * k, method="highs")
    else:
        res = linprog(c, A_eq=rows[:1], b_eq=rhs[:1], A_ub=rows[1:] or None, b_ub=rhs[1:] or None,
                      bounds=[(0, None)] * k, method="highs")
    if res.status == 2:
        return None
    return -res.fun
