"""Command-line front end.

Exit status 0 means the analysis ran, whatever its verdict; 2 means the input
could not be used.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from . import __version__
from .arbitrage import check_nflvr, find_one_step_arbitrage
from .emh import K_STRONG, K_WEAK, SMOOTH, STRONG, VARIANTS, WEAK
from .emh import knightian_strong, knightian_weak, smooth_emh, strong_emh, weak_emh
from .errors import (
    AnalysisError,
    DiagnosticLimit,
    EmptyPolytope,
    InputError,
    KnightmarkError,
    OrderUnsupported,
    SchemaError,
    UnboundedBelow,
)
from .io import Setup, dumps_report, load, to_jsonable
from .rational import fmt, fmt_vec, to_fraction
from .superhedge import MartingalePolytope, full_support_check, superhedge_price
from .support import support_set, technical_reduction

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 1

COMMANDS = ("validate", "arbitrage", "superhedge", "polytope", "viability", "support", "emh", "report", "fuzz")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="knightmark", description="Exact no-arbitrage analysis of finite markets.")
    p.add_argument("--version", action="version", version=f"knightmark {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="market spec JSON file or bundled fixture name")
    common.add_argument("--format", choices=("json", "human"), default="json")
    common.add_argument("--parallel", type=int, default=1, metavar="N", help="worker-count hint for LP batches")
    common.add_argument("--numeraire", metavar="ASSET", help="divide all prices by this asset")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("superhedge", "report"):
            sp.add_argument("--payoff", help="payoff vector: JSON file or inline list")
        if name in ("support", "report"):
            sp.add_argument("--set", dest="states", help="comma-separated state names (default: all)")
        if name == "emh":
            sp.add_argument("--variant", choices=VARIANTS + ("all",), default="all")
        if name == "fuzz":
            sp.add_argument("--count", type=int, default=10)
            sp.add_argument("--seed", type=int, default=0)
    return p


def _payoff(setup: Setup, text: Optional[str]):
    if text is None:
        raise InputError("--payoff is required")
    path = Path(text)
    raw = path.read_text("utf-8") if path.exists() else text
    try:
        data = json.loads(raw, parse_float=lambda s: s)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"payoff is not JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if isinstance(data, dict):
        vals = [data.get(s, 0) for s in setup.market.labels]
    elif isinstance(data, list):
        vals = data
    else:
        raise SchemaError("payoff must be a list or an object keyed by state")
    return setup.market.check_payoff([to_fraction(v) for v in vals])


def _states(setup: Setup, text: Optional[str]):
    if not text:
        return frozenset(range(setup.market.n))
    names = [s.strip() for s in text.split(",") if s.strip()]
    return setup.market.indices(names)


def _names(setup, states):
    return [setup.market.labels[w] for w in sorted(states)]


def _strategy(setup, h):
    labels = setup.market.labels
    return {g.label(labels): fmt(v) for g, v in zip(setup.market.generators, h) if v != 0}


# -- commands -------------------------------------------------------------

def cmd_validate(setup: Setup, args) -> dict:
    m = setup.market
    return {
        "valid": True,
        "states": list(m.labels),
        "horizon": m.horizon,
        "assets": list(m.prices.assets),
        "cone_mode": m.cone.mode,
        "generators": [{"label": g.label(m.labels), "payoff": fmt_vec(g.payoff)} for g in m.generators],
        "order": setup.order.kind,
        "polar_states": _names(setup, setup.order.polar_mask),
        "relevance": setup.relevance.preset,
    }


def _arb_cert(setup, cert):
    if cert is None:
        return None
    return {
        "strategy": _strategy(setup, cert.strategy),
        "payoff": fmt_vec(cert.payoff),
        "relevant": fmt_vec(cert.relevant),
        "witness_rows": list(cert.witness_rows),
    }


def cmd_arbitrage(setup: Setup, args) -> dict:
    m, o, r = setup.market, setup.order, setup.relevance
    verdict = check_nflvr(m, o, r, args.parallel)
    out = {
        "arbitrage": not verdict.strongly_free,
        "nflvr": verdict.status,
        "certificate": _arb_cert(setup, verdict.certificate),
        "relevant_prices": [None if p is None else fmt(p) for p in verdict.prices],
        "theorem": verdict.backing,
        "cross_check": verdict.cross_check,
    }
    if o.state_based:
        one = find_one_step_arbitrage(m, o)
        out["one_step"] = None if one is None else {"time": one.time, **_arb_cert(setup, one.certificate)}
    return out


def cmd_superhedge(setup: Setup, args) -> dict:
    x = _payoff(setup, args.payoff)
    try:
        cert = superhedge_price(setup.market, setup.order, x)
    except UnboundedBelow as exc:
        c = exc.certificate or {}
        return {"price": "-inf", "arbitrage_strategy": _strategy(setup, c.get("strategy", ())),
                "arbitrage_gain": fmt_vec(c.get("gain", ())), "theorem": "unbounded-price-means-arbitrage"}
    return {
        "payoff": fmt_vec(x),
        "price": fmt(cert.price),
        "strategy": _strategy(setup, cert.strategy),
        "gain": fmt_vec(cert.gain),
        "residual": None if cert.residual is None else fmt_vec(cert.residual),
        "dual_measure": fmt_vec(cert.dual),
        "theorem": "superhedging-duality",
    }


def cmd_polytope(setup: Setup, args) -> dict:
    poly = MartingalePolytope(setup.market, setup.order)
    point = poly.feasible_point()
    out = {"empty": point is None, "point": None if point is None else fmt_vec(point)}
    if point is not None:
        try:
            out["vertices"] = [fmt_vec(v) for v in poly.vertices()]
        except DiagnosticLimit as exc:
            out["vertices"] = None
            out["vertices_skipped"] = str(exc)
        single = poly.is_singleton()
        out["singleton"] = single is not None
    out["theorem"] = "martingale-functionals-dual-domain"
    return out


def cmd_viability(setup: Setup, args) -> dict:
    rep = full_support_check(setup.market, setup.order, setup.relevance, args.parallel)
    return {
        "viable": rep.passed,
        "polytope_empty": rep.polytope_empty,
        "values": [None if v is None else fmt(v) for v in rep.values],
        "witnesses": [None if w is None else fmt_vec(w) for w in rep.witnesses],
        "row_charges": None if rep.row_charges is None else [None if v is None else fmt(v) for v in rep.row_charges],
        "caveat": rep.caveat,
        "theorem": rep.backing,
    }


def cmd_support(setup: Setup, args) -> dict:
    states = _states(setup, args.states)
    res = support_set(setup.market, setup.order, states, args.parallel)
    return {
        "set": _names(setup, res.input_set),
        "support": _names(setup, res.final_set),
        "charged_cross_check": _names(setup, res.charged_set),
        "agrees": res.agrees,
        "splits": [
            {
                "time": rec.time,
                "beta": rec.beta,
                "cells": [_names(setup, c) for c in rec.cells],
                "residual": _names(setup, rec.residual),
                "strategies": [fmt_vec(s) for s in rec.strategies],
                "warning": rec.warning,
            }
            for rec in res.records
        ],
        "theorem": "support-recursion-equals-charged-states",
    }


def _emh_one(setup: Setup, variant: str, workers: int):
    o = setup.order
    priors = o.priors
    if variant in (STRONG, WEAK):
        if not priors:
            raise InputError(f"variant {variant} needs a prior in the order section")
        prior = o.mixture if o.mixture is not None else priors[0]
        return strong_emh(setup.market, prior) if variant == STRONG else weak_emh(setup.market, prior, workers)
    if variant in (K_STRONG, K_WEAK):
        if not priors:
            raise InputError(f"variant {variant} needs priors in the order section")
        if variant == K_STRONG:
            return knightian_strong(setup.market, priors, workers)
        return knightian_weak(setup.market, priors, workers)
    if o.weights is None:
        raise InputError("variant smooth needs mixture_weights in the order section")
    return smooth_emh(setup.market, o.weights, priors, workers)


def _emh_json(rep) -> dict:
    return {
        "variant": rep.variant,
        "verdict": rep.verdict,
        "witnesses": to_jsonable(rep.witnesses),
        "note": rep.note,
        "theorem": rep.backing,
    }


def cmd_emh(setup: Setup, args) -> dict:
    if args.variant != "all":
        try:
            return _emh_json(_emh_one(setup, args.variant, args.parallel))
        except EmptyPolytope as exc:
            return {"variant": args.variant, "verdict": False, "error": str(exc)}
    variants = [v for v in VARIANTS if _applicable(setup, v)]

    def run(v):
        try:
            return _emh_json(_emh_one(setup, v, 1))
        except EmptyPolytope as exc:
            return {"variant": v, "verdict": False, "error": str(exc)}

    with ThreadPoolExecutor(max_workers=max(1, args.parallel)) as pool:
        results = list(pool.map(run, variants))
    return {"variants": results}


def _applicable(setup, variant):
    o = setup.order
    if variant == SMOOTH:
        return o.weights is not None
    return bool(o.priors)


def cmd_report(setup: Setup, args) -> dict:
    out = {"validate": cmd_validate(setup, args), "arbitrage": cmd_arbitrage(setup, args),
           "polytope": cmd_polytope(setup, args), "viability": cmd_viability(setup, args)}
    if args.payoff is not None:
        out["superhedge"] = cmd_superhedge(setup, args)
    if setup.order.state_based:
        out["support"] = cmd_support(setup, args)
        if args.payoff is not None and not out["arbitrage"]["arbitrage"]:
            try:
                rep = technical_reduction(setup.market, setup.order, _payoff(setup, args.payoff))
                out["reduction"] = {"price": fmt(rep.price), "restricted_price": fmt(rep.restricted_price),
                                    "dual_value": fmt(rep.dual_value), "holds": rep.holds,
                                    "support": _names(setup, rep.support),
                                    "theorem": "restricted-support-reduction"}
            except KnightmarkError as exc:
                out["reduction"] = {"error": str(exc)}
    else:
        out["support"] = {"unsupported": "expectation order"}
    args.variant = "all"
    out["emh"] = cmd_emh(setup, args)
    return out


def cmd_fuzz(args) -> dict:
    from .fuzz import run_fuzz

    results = run_fuzz(args.count, args.seed, args.parallel)
    failures = []
    for r in results:
        if not r.passed:
            failures.append({"seed": r.seed, "checks": r.failures(), "counterexample": r.counterexample,
                             "shrink_trace": r.shrink_trace})
    return {
        "count": len(results),
        "seed": args.seed,
        "passed": sum(1 for r in results if r.passed),
        "arbitrage_free": sum(1 for r in results if r.arbitrage_free),
        "failures": failures,
    }


_HANDLERS = {
    "validate": cmd_validate, "arbitrage": cmd_arbitrage, "superhedge": cmd_superhedge,
    "polytope": cmd_polytope, "viability": cmd_viability, "support": cmd_support,
    "emh": cmd_emh, "report": cmd_report,
}


def _human(data, indent=0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for k, v in data.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_human(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(data, list):
        for v in data:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.append(_human(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_inline(data)}")
    return "\n".join(lines)


def _flat(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _inline(v):
    if isinstance(v, list):
        return "(" + ", ".join(_inline(x) for x in v) + ")"
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def run_command(argv) -> tuple:
    """Run one CLI invocation; returns ``(exit_code, report_dict_or_None, text)``."""
    parser = _parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else EXIT_INPUT), None, ""
    # the echo leaves out --parallel and --format so reports stay byte-identical
    echo = {"command": args.command}
    for key in ("spec", "payoff", "states", "variant", "numeraire", "count", "seed"):
        if getattr(args, key, None) is not None:
            echo[key] = getattr(args, key)
    try:
        if args.command == "fuzz":
            body = cmd_fuzz(args)
        else:
            if not args.spec:
                raise InputError("--spec is required")
            setup = load(args.spec, args.numeraire)
            body = _HANDLERS[args.command](setup, args)
            echo["market"] = setup.document.name
    except (InputError, OrderUnsupported) as exc:
        report = {"command": echo, "error": {"type": type(exc).__name__, "message": str(exc)}}
        return EXIT_INPUT, report, dumps_report(report)
    except OSError as exc:
        report = {"command": echo, "error": {"type": "OSError", "message": str(exc)}}
        return EXIT_INPUT, report, dumps_report(report)
    except AnalysisError as exc:
        body = {"analysis_error": {"type": type(exc).__name__, "message": str(exc)}}
    except KnightmarkError as exc:
        report = {"command": echo, "error": {"type": type(exc).__name__, "message": str(exc)}}
        return EXIT_INTERNAL, report, dumps_report(report)
    report = {"command": echo, "result": body}
    if args.format == "human":
        return EXIT_OK, report, _human(report) + "\n"
    return EXIT_OK, report, dumps_report(report)


def main(argv=None) -> int:
    code, report, text = run_command(sys.argv[1:] if argv is None else argv)
    if report is not None and "error" in report:
        sys.stderr.write(f"knightmark: {report['error']['type']}: {report['error']['message']}\n")
    elif text:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
