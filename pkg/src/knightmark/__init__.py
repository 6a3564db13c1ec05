"""Order-theoretic no-arbitrage analysis of finite-state markets."""

__version__ = "0.1.0"

from .arbitrage import check_nflvr, find_arbitrage, find_one_step_arbitrage, verify_arbitrage
from .emh import knightian_strong, knightian_weak, smooth_emh, strong_emh, weak_emh
from .io import build_setup, load, load_spec, parse_spec
from .lp import BACKEND
from .market import net_trade_generators, validate_market
from .order import build_order, classify, default_relevance, dominates
from .superhedge import (
    MartingalePolytope,
    full_support_check,
    martingale_polytope,
    sublinear_expectation,
    superhedge_price,
)
from .support import (
    conditional_splitting,
    ftap_certificates,
    superhedge_on_set,
    support_set,
    technical_reduction,
)

__all__ = [
    "BACKEND", "MartingalePolytope", "build_order", "build_setup", "check_nflvr", "classify",
    "conditional_splitting", "default_relevance", "dominates", "find_arbitrage",
    "find_one_step_arbitrage", "ftap_certificates", "full_support_check", "knightian_strong",
    "knightian_weak", "load", "load_spec", "martingale_polytope", "net_trade_generators",
    "parse_spec", "smooth_emh", "strong_emh", "sublinear_expectation", "superhedge_on_set",
    "superhedge_price", "support_set", "technical_reduction", "validate_market",
    "verify_arbitrage", "weak_emh",
]
