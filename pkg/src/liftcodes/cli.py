"""Command-line front end.

Exit codes: 0 success (decode failures are reported, not raised), 1 usage
error, 2 infeasible parameters or an exhaustive-size guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import analysis
from .codes import (
    ConstructionParams,
    LiftedCode,
    base_from_degrees,
    base_parity_multivariate,
    base_parity_univariate,
    base_reed_solomon,
    construct,
)
from .errors import GuardError, ParameterError, UsageError
from .local import SCENARIOS, corrupt, monte_carlo
from .space import FuncTable

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# -- code specification ------------------------------------------------------


def _add_construction_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("construction inputs")
    g.add_argument("--theorem", type=int, choices=(1, 2, 3, 4))
    g.add_argument("--k", type=int)
    g.add_argument("--ell", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--eps", type=float)
    g.add_argument("--p", type=int)
    g.add_argument("--N0", type=int)
    g.add_argument("--delta", type=float)
    g.add_argument("--s", type=int)
    g.add_argument("--c", type=int)


def _add_code_args(p: argparse.ArgumentParser) -> None:
    _add_construction_args(p)
    g = p.add_argument_group("explicit base code (instead of --theorem)")
    g.add_argument("--base", choices=("parity", "rs", "degs"))
    g.add_argument("--Q", type=int)
    g.add_argument("--q", type=int)
    g.add_argument("--t", type=int, default=1)
    g.add_argument("--d", type=int, help="Reed-Solomon degree bound")
    g.add_argument("--base-degs", type=_int_list, help="univariate base degree set, e.g. 0,1,2")


def _construction_inputs(args) -> dict:
    keys = {1: ("k", "ell", "m"), 2: ("eps", "p", "N0", "ell", "m"), 3: ("eps", "ell", "m"),
            4: ("delta", "eps", "N0", "s", "m", "c")}[args.theorem]
    return {k: getattr(args, k) for k in keys if getattr(args, k) is not None}


def build_code(args) -> tuple[LiftedCode, ConstructionParams | None]:
    if args.theorem is not None:
        params, code = construct(args.theorem, **_construction_inputs(args))
        return code, params
    if args.m is None or args.Q is None:
        raise UsageError("give --theorem, or --base with --Q and --m")
    base = args.base or ("degs" if args.base_degs else "parity")
    if base == "parity":
        q = args.q or 2
        b = base_parity_univariate(args.Q, q) if args.t == 1 else base_parity_multivariate(args.Q, args.t, q)
    elif base == "rs":
        if args.d is None:
            raise UsageError("--base rs needs --d")
        b = base_reed_solomon(args.Q, args.d)
    else:
        if not args.base_degs:
            raise UsageError("--base degs needs --base-degs")
        b = base_from_degrees(args.Q, args.q or 2, args.base_degs)
    return LiftedCode(b, args.m), None


# -- output ------------------------------------------------------------------


def _plain(obj):
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator, "value": float(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _tsv_cell(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return "" if v is None else str(v)


def emit(report: dict, fmt: str, rows: list[dict] | None = None, out=None) -> None:
    """JSON: the report object.  TSV: one row per entry of ``rows``, else key/value lines."""
    out = out or sys.stdout
    report = _plain(report)
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True) + "\n")
        return
    if rows:
        rows = _plain(rows)
        cols = sorted({k for r in rows for k in r})
        out.write("\t".join(cols) + "\n")
        for r in rows:
            out.write("\t".join(_tsv_cell(r.get(c)) for c in cols) + "\n")
    else:
        for k in sorted(report):
            out.write(f"{k}\t{_tsv_cell(report[k])}\n")


def _code_block(code: LiftedCode, params: ConstructionParams | None) -> dict:
    return code.descriptor(theorem=params.theorem if params else None,
                           locality=params.locality if params else None)


# -- commands -------------------------------------------------------------------


def cmd_params(args) -> tuple[dict, list | None]:
    if args.theorem is None:
        raise UsageError("params needs --theorem")
    params, code = construct(args.theorem, **_construction_inputs(args))
    out = params.to_dict()
    out["feasible"] = True
    return out, None


def cmd_dim(args) -> tuple[dict, list | None]:
    code, params = build_code(args)
    out = {"code": _code_block(code, params), "dim": code.dimension, "N": code.length}
    if params is not None:
        out["dim_bound"] = params.dim_bound
        out["bound_holds"] = params.dim_bound is None or code.dimension >= params.dim_bound
    return out, None


def cmd_lift_degs(args) -> tuple[dict, list | None]:
    code, params = build_code(args)
    degs = [list(d) for d in code.degree_set]
    out = {"code": _code_block(code, params), "dim": len(degs), "degrees": degs,
           "orbits": [{"rep": list(r), "size": b} for r, b in code.orbits()]}
    return out, [{"degree": d} for d in degs]


def _message(args, code: LiftedCode, rng) -> list[int]:
    if args.message is not None:
        return args.message
    return code.random_message(rng)


def cmd_encode(args) -> tuple[dict, list | None]:
    code, params = build_code(args)
    if args.message is None and args.seed is None:
        raise UsageError("encode needs --message or --seed")
    rng = np.random.default_rng(args.seed)
    msg = _message(args, code, rng)
    f = code.encode(msg)
    out = {"code": _code_block(code, params), "message": msg, "seed": args.seed, "codeword": f.to_dict()}
    return out, [{"index": i, "value": int(v)} for i, v in enumerate(f.values)]


def cmd_corrupt(args) -> tuple[dict, list | None]:
    code, params = build_code(args)
    if args.seed is None:
        raise UsageError("corrupt needs --seed")
    rng = np.random.default_rng(args.seed)
    if args.input:
        with open(args.input) as fh:
            f = FuncTable.from_dict(json.load(fh))
    else:
        f = code.encode(_message(args, code, rng))
    g, positions = corrupt(f, args.errors, rng)
    out = {"code": _code_block(code, params), "seed": args.seed, "errors": args.errors,
           "positions": [int(i) for i in positions], "original": f.to_dict(), "received": g.to_dict()}
    return out, [{"index": int(i), "original": int(f.values[i]), "received": int(g.values[i])} for i in positions]


def _experiment(args, scenario: str) -> tuple[dict, list | None]:
    code, params = build_code(args)
    if args.seed is None:
        raise UsageError("randomized commands need --seed")
    rep = monte_carlo(code, scenario, args.errors, args.trials, args.seed,
                      target=getattr(args, "target", "random"), keep_trials=args.format == "tsv")
    out = rep.to_dict()
    out["code"] = _code_block(code, params)
    return out, rep.per_trial or None


def cmd_correct(args) -> tuple[dict, list | None]:
    scenario = args.scenario
    if scenario is None:
        code, _ = build_code(args)
        scenario = "correct_rs" if code.base.rs_degree is not None and code.t == 1 else "correct_generic"
    if not scenario.startswith("correct"):
        raise UsageError("correct needs a correct_* scenario")
    return _experiment(args, scenario)


def cmd_test(args) -> tuple[dict, list | None]:
    return _experiment(args, "test_random" if args.random_functions else "test")


def cmd_distance(args) -> tuple[dict, list | None]:
    if args.sweep:
        if args.Q is None or args.m is None:
            raise UsageError("--sweep needs --Q and --m")
        reports = analysis.distance_sweep(args.Q, args.q or 2, args.m, args.limit)
        rows = [r.to_dict() for r in reports]
        out = {"Q": args.Q, "q": args.q or 2, "m": args.m, "cases": rows,
               "violations": sum(not r.ok for r in reports)}
        return out, rows
    code, params = build_code(args)
    rep = analysis.verify_distance_theorem(code.base, code.m, args.limit)
    out = rep.to_dict()
    out["base"] = out["delta_base"]
    out["lift"] = out["delta_lift"]
    return out, None


def cmd_nikodym(args) -> tuple[dict, list | None]:
    bound = analysis.nikodym_lower_bound(args.q, args.m)
    out: dict = {"q": args.q, "m": args.m, "lower_bound": bound}
    if args.scan_size is not None:
        checked, found = analysis.scan_subsets(args.q, args.m, args.scan_size)
        out["scan"] = {"size": args.scan_size, "checked": checked, "nikodym": found}
    if args.search:
        if args.seed is None:
            raise UsageError("--search needs --seed")
        sets = analysis.nikodym_search(args.q, args.m, args.search, args.seed)
        best = min(sets, key=lambda s: (len(s), s.indices()))
        out["search"] = {"restarts": args.search, "seed": args.seed, "sizes": [len(s) for s in sets],
                         "smallest": best.to_dict()}
    return out, None


def cmd_oracle(args) -> tuple[dict, list | None]:
    code, _ = build_code(args)
    rep = analysis.oracle_equivalence(code.base, code.m, mode=args.mode, samples=args.samples,
                                      seed=args.seed if args.seed is not None else 0)
    out = rep.to_dict()
    out["code"] = _code_block(code, None)
    return out, None


COMMANDS = {
    "params": cmd_params, "dim": cmd_dim, "lift-degs": cmd_lift_degs, "encode": cmd_encode,
    "corrupt": cmd_corrupt, "correct": cmd_correct, "test": cmd_test, "distance": cmd_distance,
    "nikodym": cmd_nikodym, "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liftcodes", description="Lifted affine-invariant codes: construction, experiments, oracles.")
    parser.add_argument("--format", choices=("json", "tsv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("params", help="derived parameters of a construction")
    _add_construction_args(p)
    for name in ("dim", "lift-degs"):
        _add_code_args(sub.add_parser(name, help=f"{name} of a lifted code"))
    helps = {"encode": "encode a message (random if omitted) into a codeword table",
             "corrupt": "add random errors to a codeword or a given table"}
    for name in ("encode", "corrupt"):
        p = sub.add_parser(name, help=helps[name])
        _add_code_args(p)
        p.add_argument("--message", type=_int_list)
        p.add_argument("--seed", type=int)
        if name == "corrupt":
            p.add_argument("--errors", type=int, required=True)
            p.add_argument("--input", help="JSON function table to corrupt instead of a fresh codeword")
    p = sub.add_parser("correct", help="Monte-Carlo local correction")
    _add_code_args(p)
    p.add_argument("--scenario", choices=[s for s in SCENARIOS if s.startswith("correct")])
    p.add_argument("--target", choices=("random", "corrupted"), default="random")
    p = sub.add_parser("test", help="Monte-Carlo local testing")
    _add_code_args(p)
    p.add_argument("--random-functions", action="store_true", help="test uniformly random functions")
    for p in (sub.choices["correct"], sub.choices["test"]):
        p.add_argument("--errors", type=int, default=0)
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--seed", type=int)
    p = sub.add_parser("distance", help="exact distances of a base code and its lift")
    _add_code_args(p)
    p.add_argument("--sweep", action="store_true", help="all affine-invariant univariate bases at (Q, q)")
    p.add_argument("--limit", type=int, default=analysis.DIRECT_LIMIT, help="loosen the enumeration guard")
    p = sub.add_parser("nikodym", help="Nikodym lower bound, subset scan and greedy search")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--scan-size", type=int)
    p.add_argument("--search", type=int, default=0, help="greedy restarts")
    p.add_argument("--seed", type=int)
    p = sub.add_parser("oracle", help="lift-by-restriction versus lift-by-degrees")
    _add_code_args(p)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    for p in sub.choices.values():
        p.add_argument("--format", choices=("json", "tsv"), default=argparse.SUPPRESS)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, rows = COMMANDS[args.command](args)
    except (ParameterError, GuardError) as exc:
        emit({"command": args.command, "feasible": False, "error": str(exc),
              "constraint": getattr(exc, "constraint", None)}, args.format)
        return EXIT_INFEASIBLE
    except UsageError as exc:
        print(f"liftcodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report["command"] = args.command
    emit(report, args.format, rows)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
