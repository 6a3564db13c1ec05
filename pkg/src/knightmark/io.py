"""Market-spec ingestion and report serialization."""

from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import jsonschema

from .document import AssetDoc, ConeDoc, MarketSpecDocument, OrderDoc, RelevanceDoc
from .errors import SchemaError
from .market import ValidatedMarket, validate_market
from .order import CUSTOM, OrderStructure, RelevanceSpec, build_order, custom_relevance, default_relevance
from .rational import fmt, to_fraction

FIXTURES = ("binomial", "kreps", "example45", "example34", "atom", "onetwo")


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("knightmark").joinpath("market_spec.schema.json").read_text("utf-8")
    return json.loads(text)


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _vec(v) -> tuple:
    return tuple(to_fraction(x) for x in v)


def parse_spec(data: Union[bytes, str]) -> MarketSpecDocument:
    """Parse UTF-8 JSON exactly (decimals become exact rationals) and validate it."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError(f"input is not UTF-8: {exc}") from None
    try:
        raw = json.loads(data, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, _path(err.absolute_path))
    return document_from_json(raw)


def document_from_json(raw: dict) -> MarketSpecDocument:
    assets = []
    for a in raw.get("assets", []):
        prices = tuple(_vec(p) if isinstance(p, list) else to_fraction(p) for p in a["prices"])
        assets.append(AssetDoc(a["name"], prices))
    cone_raw = raw.get("cone", {})
    cone = ConeDoc(
        cone_raw.get("mode", "linear"),
        tuple(_vec(g) for g in cone_raw["generators"]) if "generators" in cone_raw else None,
        tuple(cone_raw["no_short"]) if "no_short" in cone_raw else None,
        tuple(cone_raw["times"]) if "times" in cone_raw else None,
    )
    o = raw.get("order", {"kind": "pointwise"})
    order = OrderDoc(
        o["kind"],
        tuple(_vec(p) for p in o["priors"]) if "priors" in o else None,
        _vec(o["mixture_weights"]) if "mixture_weights" in o else None,
    )
    rel = raw.get("relevance", "rop")
    if isinstance(rel, str):
        relevance = RelevanceDoc(rel)
    elif isinstance(rel, list):
        relevance = RelevanceDoc(CUSTOM, tuple(_vec(g) for g in rel))
    else:
        gens = rel.get("generators")
        preset = rel.get("preset", CUSTOM if gens else "rop")
        relevance = RelevanceDoc(preset, tuple(_vec(g) for g in gens) if gens else None)
    return MarketSpecDocument(
        states=tuple(raw["states"]),
        filtration=tuple(tuple(tuple(c) for c in part) for part in raw["filtration"]),
        assets=tuple(assets),
        cone=cone,
        order=order,
        relevance=relevance,
        numeraire=raw.get("numeraire"),
        name=raw.get("name"),
    )


def document_to_json(doc: MarketSpecDocument) -> dict:
    """Inverse of :func:`document_from_json` (rationals as strings)."""
    out = {}
    if doc.name is not None:
        out["name"] = doc.name
    out["states"] = list(doc.states)
    out["filtration"] = [[list(c) for c in part] for part in doc.filtration]
    out["assets"] = [
        {"name": a.name, "prices": [fmt_vec_or(p) for p in a.prices]} for a in doc.assets
    ]
    if doc.numeraire is not None:
        out["numeraire"] = doc.numeraire
    cone = {"mode": doc.cone.mode}
    if doc.cone.generators is not None:
        cone["generators"] = [[fmt(x) for x in g] for g in doc.cone.generators]
    if doc.cone.no_short is not None:
        cone["no_short"] = list(doc.cone.no_short)
    if doc.cone.times is not None:
        cone["times"] = list(doc.cone.times)
    out["cone"] = cone
    order = {"kind": doc.order.kind}
    if doc.order.priors is not None:
        order["priors"] = [[fmt(x) for x in p] for p in doc.order.priors]
    if doc.order.mixture_weights is not None:
        order["mixture_weights"] = [fmt(x) for x in doc.order.mixture_weights]
    out["order"] = order
    if doc.relevance.generators is not None:
        out["relevance"] = {"preset": doc.relevance.preset,
                            "generators": [[fmt(x) for x in g] for g in doc.relevance.generators]}
    else:
        out["relevance"] = doc.relevance.preset
    return out


def fmt_vec_or(p):
    if isinstance(p, (tuple, list)):
        return [fmt(x) for x in p]
    return fmt(p)


def fixture_path(name: str) -> Optional[Path]:
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in FIXTURES:
        return None
    return Path(str(resources.files("knightmark").joinpath("fixtures", stem + ".json")))


def load_spec(path_or_name: Union[str, Path]) -> MarketSpecDocument:
    """Read a spec from a file path, falling back to a bundled fixture name."""
    p = Path(path_or_name)
    if not p.exists():
        fx = fixture_path(str(path_or_name))
        if fx is None:
            raise SchemaError(f"no such spec file or bundled fixture: {path_or_name}")
        p = fx
    return parse_spec(p.read_bytes())


@dataclass(frozen=True)
class Setup:
    document: MarketSpecDocument
    market: ValidatedMarket
    order: OrderStructure
    relevance: RelevanceSpec


def build_setup(doc: MarketSpecDocument, numeraire: Optional[str] = None) -> Setup:
    market = validate_market(doc, numeraire)
    order = build_order(doc.order.kind, market.n, doc.order.priors, doc.order.mixture_weights)
    if doc.relevance.generators is not None:
        rel = custom_relevance(doc.relevance.generators, order)
    else:
        rel = default_relevance(doc.relevance.preset, order)
    return Setup(doc, market, order, rel)


def load(path_or_name, numeraire: Optional[str] = None) -> Setup:
    return build_setup(load_spec(path_or_name), numeraire)


# -- reports --------------------------------------------------------------

def to_jsonable(value):
    """Convert library results into JSON-ready data; rationals become "p/q" strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, int):
        return value
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (frozenset, set)):
        return [to_jsonable(v) for v in sorted(value)]
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if dataclasses.is_dataclass(value):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)
                if f.compare}
    return str(value)


def dumps_report(report: dict) -> str:
    """Deterministic JSON text: insertion order is kept, no whitespace variance."""
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
