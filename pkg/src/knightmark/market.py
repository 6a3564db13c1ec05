"""Finite market model: states, filtration, adapted prices and the net-trade cone."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .document import MarketSpecDocument
from .errors import (
    AdaptednessError,
    DimensionMismatch,
    MarketError,
    MeasurabilityError,
    NegativePriceError,
    RefinementError,
)
from .rational import to_fraction

LINEAR = "linear"
CONE = "cone"


@dataclass(frozen=True)
class StateSpace:
    labels: tuple

    def __post_init__(self):
        if not self.labels:
            raise MarketError("state space must contain at least one state")
        if len(set(self.labels)) != len(self.labels):
            raise MarketError("state labels must be unique")

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Filtration:
    """``partitions[t]`` is a tuple of cells; a cell is a sorted tuple of state indices."""

    partitions: tuple

    @property
    def horizon(self) -> int:
        return len(self.partitions) - 1

    def cell_of(self, t: int, state: int) -> tuple:
        for cell in self.partitions[t]:
            if state in cell:
                return cell
        raise IndexError(state)


@dataclass(frozen=True)
class PriceProcess:
    """``values[t][j][w]``: discounted price of asset ``j`` at time ``t`` in state ``w``."""

    values: tuple
    assets: tuple

    def increment(self, t: int, j: int) -> tuple:
        return tuple(b - a for a, b in zip(self.values[t - 1][j], self.values[t][j]))


@dataclass(frozen=True)
class Generator:
    """One generator of the net-trade cone.

    Derived generators are one-step gains ``sign * 1_cell * (S_t^j - S_{t-1}^j)``;
    ``cell`` is a cell of ``P_{t-1}``.  User-supplied generators leave ``asset``
    and ``cell`` unset and may carry an optional trading time.
    """

    payoff: tuple
    time: Optional[int] = None
    cell: Optional[tuple] = None
    asset: Optional[str] = None
    sign: int = 1
    index: int = 0

    @property
    def derived(self) -> bool:
        return self.asset is not None

    def label(self, states: Sequence[str]) -> str:
        if not self.derived:
            return f"g{self.index}"
        names = ",".join(states[i] for i in self.cell)
        prefix = "-" if self.sign < 0 else ""
        return f"{prefix}{self.asset}@t{self.time}{{{names}}}"


@dataclass(frozen=True)
class TradeCone:
    mode: str
    generators: tuple  # of Generator

    @property
    def payoffs(self) -> list:
        return [g.payoff for g in self.generators]

    @property
    def linear(self) -> bool:
        return self.mode == LINEAR


@dataclass(frozen=True)
class ValidatedMarket:
    states: StateSpace
    filtration: Filtration
    prices: PriceProcess
    cone: TradeCone
    name: Optional[str] = None

    @property
    def n(self) -> int:
        return self.states.size

    @property
    def horizon(self) -> int:
        return self.filtration.horizon

    @property
    def labels(self) -> tuple:
        return self.states.labels

    @property
    def generators(self) -> tuple:
        return self.cone.generators

    @property
    def linear(self) -> bool:
        return self.cone.linear

    def index(self, label: str) -> int:
        try:
            return self.states.labels.index(label)
        except ValueError:
            raise MarketError(f"unknown state {label!r}") from None

    def indices(self, labels) -> frozenset:
        return frozenset(self.index(s) for s in labels)

    def generators_at(self, t: int) -> list:
        """Generators tradable at step ``t``; untimed custom generators count as step 1."""
        return [g for g in self.generators if (g.time or 1) == t]

    def trading_times(self) -> list:
        return sorted({g.time or 1 for g in self.generators})

    def check_payoff(self, payoff) -> tuple:
        """Parse ``payoff`` exactly and check it is F_T-measurable."""
        x = tuple(to_fraction(v) for v in payoff)
        if len(x) != self.n:
            raise DimensionMismatch(f"payoff has {len(x)} entries, market has {self.n} states")
        _check_measurable(x, self.filtration.partitions[-1], self.labels, "payoff")
        return x

    def gain(self, coefficients) -> tuple:
        """Terminal payoff of a combination of generators."""
        out = [Fraction(0)] * self.n
        for h, g in zip(coefficients, self.generators):
            if h:
                for w in range(self.n):
                    out[w] += h * g.payoff[w]
        return tuple(out)


def _check_measurable(x, partition, labels, what):
    for cell in partition:
        first = x[cell[0]]
        for w in cell[1:]:
            if x[w] != first:
                raise MeasurabilityError(
                    f"{what} differs on states {labels[cell[0]]!r} and {labels[w]!r} of one terminal cell"
                )


def _normalize_filtration(doc: MarketSpecDocument, index: dict) -> Filtration:
    n = len(index)
    if len(doc.filtration) < 2:
        raise MarketError("filtration needs at least two dates (T >= 1)")
    parts = []
    for t, cells in enumerate(doc.filtration):
        seen = set()
        norm = []
        for cell in cells:
            if not cell:
                raise MarketError(f"empty cell in partition at t={t}")
            idx = []
            for name in cell:
                if name not in index:
                    raise MarketError(f"unknown state {name!r} in partition at t={t}")
                i = index[name]
                if i in seen:
                    raise MarketError(f"state {name!r} appears twice in partition at t={t}")
                seen.add(i)
                idx.append(i)
            norm.append(tuple(sorted(idx)))
        if len(seen) != n:
            missing = [s for s, i in index.items() if i not in seen]
            raise MarketError(f"partition at t={t} misses states {missing}")
        parts.append(tuple(sorted(norm)))
    for t in range(1, len(parts)):
        coarse = {}
        for k, cell in enumerate(parts[t - 1]):
            for i in cell:
                coarse[i] = k
        for cell in parts[t]:
            if len({coarse[i] for i in cell}) != 1:
                raise RefinementError(f"partition at t={t} does not refine the one at t={t - 1}")
    return Filtration(tuple(parts))


def _normalize_prices(doc, filtration, labels):
    n, horizon = len(labels), filtration.horizon
    names = []
    table = []  # table[j][t] = tuple over states
    for asset in doc.assets:
        if asset.name in names:
            raise MarketError(f"duplicate asset name {asset.name!r}")
        names.append(asset.name)
        if len(asset.prices) != horizon + 1:
            raise DimensionMismatch(
                f"asset {asset.name!r} has {len(asset.prices)} dates, filtration has {horizon + 1}"
            )
        path = []
        for t, row in enumerate(asset.prices):
            if isinstance(row, (list, tuple)):
                vals = tuple(to_fraction(v) for v in row)
                if len(vals) == 1 and n > 1:
                    vals = vals * n
            else:
                vals = (to_fraction(row),) * n
            if len(vals) != n:
                raise DimensionMismatch(f"asset {asset.name!r} at t={t} has {len(vals)} prices for {n} states")
            for w, v in enumerate(vals):
                if v < 0:
                    raise NegativePriceError(f"asset {asset.name!r} has price {v} at t={t} in state {labels[w]!r}")
            for cell in filtration.partitions[t]:
                for w in cell[1:]:
                    if vals[w] != vals[cell[0]]:
                        raise AdaptednessError(
                            f"asset {asset.name!r} price at t={t} differs on states "
                            f"{labels[cell[0]]!r} and {labels[w]!r} of one cell"
                        )
            path.append(vals)
        table.append(path)
    return names, table


def _apply_numeraire(names, table, numeraire):
    if numeraire not in names:
        raise MarketError(f"numeraire {numeraire!r} is not an asset")
    k = names.index(numeraire)
    base = table[k]
    for path in base:
        if any(v <= 0 for v in path):
            raise MarketError(f"numeraire {numeraire!r} must have strictly positive prices")
    out_names, out_table = [], []
    for j, name in enumerate(names):
        if j == k:
            continue
        out_names.append(name)
        out_table.append([tuple(p / b for p, b in zip(row, brow)) for row, brow in zip(table[j], base)])
    return out_names, out_table


def validate_market(doc: MarketSpecDocument, numeraire: Optional[str] = None) -> ValidatedMarket:
    """Check every structural invariant of ``doc`` and return the normalized market.

    ``numeraire`` (or ``doc.numeraire``) names an asset by which all prices are
    divided before analysis; that asset is then dropped.
    """
    states = StateSpace(tuple(doc.states))
    index = {s: i for i, s in enumerate(states.labels)}
    filtration = _normalize_filtration(doc, index)
    names, table = _normalize_prices(doc, filtration, states.labels)
    numeraire = numeraire or doc.numeraire
    if numeraire is not None:
        names, table = _apply_numeraire(names, table, numeraire)
    values = tuple(tuple(table[j][t] for j in range(len(names))) for t in range(filtration.horizon + 1))
    prices = PriceProcess(values, tuple(names))

    mode = doc.cone.mode
    if mode not in (LINEAR, CONE):
        raise MarketError(f"unknown cone mode {mode!r}")
    if doc.cone.generators is not None:
        gens = []
        times = doc.cone.times
        if times is not None and len(times) != len(doc.cone.generators):
            raise DimensionMismatch("cone.times must have one entry per generator")
        for i, raw in enumerate(doc.cone.generators):
            payoff = tuple(to_fraction(v) for v in raw)
            if len(payoff) != states.size:
                raise DimensionMismatch(f"generator {i} has {len(payoff)} entries for {states.size} states")
            _check_measurable(payoff, filtration.partitions[-1], states.labels, f"generator {i}")
            t = None if times is None else int(times[i])
            if t is not None and not 1 <= t <= filtration.horizon:
                raise MarketError(f"generator {i} has trading time {t} outside 1..{filtration.horizon}")
            gens.append(Generator(payoff, time=t, index=i))
    else:
        no_short = set(doc.cone.no_short or ())
        unknown = no_short - set(names)
        if unknown:
            raise MarketError(f"no_short names unknown assets {sorted(unknown)}")
        if no_short and mode != CONE:
            raise MarketError("no_short requires cone mode")
        gens = []
        for base in _one_step_basis(prices, filtration, states.size):
            gens.append(base)
            if mode == CONE and base.asset not in no_short:
                gens.append(Generator(tuple(-v for v in base.payoff), base.time, base.cell, base.asset, -1))
        gens = [Generator(g.payoff, g.time, g.cell, g.asset, g.sign, i) for i, g in enumerate(gens)]
    cone = TradeCone(mode, tuple(gens))
    return ValidatedMarket(states, filtration, prices, cone, doc.name)


def _one_step_basis(prices: PriceProcess, filtration: Filtration, n: int) -> list:
    out = []
    for t in range(1, filtration.horizon + 1):
        for cell in filtration.partitions[t - 1]:
            members = set(cell)
            for j, name in enumerate(prices.assets):
                inc = prices.increment(t, j)
                payoff = tuple(inc[w] if w in members else Fraction(0) for w in range(n))
                out.append(Generator(payoff, t, cell, name, 1))
    return out


def net_trade_generators(market: ValidatedMarket) -> list:
    """The one-step basis ``1_C * (S_t^j - S_{t-1}^j)`` over t, cells C of P_{t-1}, assets j."""
    return [g.payoff for g in _one_step_basis(market.prices, market.filtration, market.n)]
