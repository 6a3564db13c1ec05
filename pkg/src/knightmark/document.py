"""In-memory form of the market-spec JSON document."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class AssetDoc:
    name: str
    prices: tuple  # prices[t][state] as Fractions


@dataclass(frozen=True)
class ConeDoc:
    mode: str = "linear"  # "linear" | "cone"
    generators: Optional[tuple] = None  # user-supplied payoff vectors
    no_short: Optional[tuple] = None  # asset names that cannot be sold short (cone mode)
    times: Optional[tuple] = None  # optional trading-time tag per custom generator


@dataclass(frozen=True)
class OrderDoc:
    kind: str = "pointwise"
    priors: Optional[tuple] = None
    mixture_weights: Optional[tuple] = None


@dataclass(frozen=True)
class RelevanceDoc:
    preset: str = "rop"
    generators: Optional[tuple] = None


@dataclass(frozen=True)
class MarketSpecDocument:
    states: tuple
    filtration: tuple  # filtration[t] = tuple of cells, each a tuple of state names
    assets: tuple = ()
    cone: ConeDoc = field(default_factory=ConeDoc)
    order: OrderDoc = field(default_factory=OrderDoc)
    relevance: RelevanceDoc = field(default_factory=RelevanceDoc)
    numeraire: Optional[str] = None
    name: Optional[str] = None

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def horizon(self) -> int:
        return len(self.filtration) - 1
