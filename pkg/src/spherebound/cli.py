"""Command-line interface: series, solve, eval, bound, table, verify."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict
from fractions import Fraction

import mpmath

from . import bounds
from .construct import ConstructionFailed, Infeasible, candidate_from_json, solve
from .modforms import ConsistencyError, GeneratorId, InsufficientTruncation, generator
from .qseries import InsufficientPrecision
from .schwartz import EvalConfig, EvaluationError, build

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_VIOLATIONS, EXIT_NUMERIC = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _config(args) -> EvalConfig:
    overrides = {}
    if args.precision is not None:
        overrides["prec"] = args.precision
    if args.order is not None:
        overrides["numeric_order"] = args.order
    return EvalConfig.from_env(**overrides)


def _run_config(args, cfg: EvalConfig) -> dict:
    return {"command": args.command, "format": args.format, **asdict(cfg)}


def _emit(payload: dict, args) -> None:
    payload = {"schemaVersion": SCHEMA_VERSION, **payload}
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for key, value in payload.items():
            print(f"{key}: {value if not isinstance(value, (dict, list)) else json.dumps(value, sort_keys=True)}")


def _dims(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --dims value {text!r}") from exc


def _candidate(args):
    if args.candidate_file:
        with open(args.candidate_file) as fh:
            data = json.load(fh)
        data = data.get("candidate", data)
        cand = candidate_from_json(data)
        if args.dim is not None and args.dim != cand.d:
            raise UsageError(f"--dim {args.dim} disagrees with candidate file (d={cand.d})")
        return cand
    if args.dim is None or args.side is None:
        raise UsageError("--dim and --side are required without --candidate-file")
    return solve(args.dim, args.side, args.n)


# -- commands -------------------------------------------------------------------


def cmd_series(args) -> int:
    try:
        tag = GeneratorId(args.generator)
    except ValueError as exc:
        raise UsageError(f"unknown generator {args.generator!r}; choose from {[g.value for g in GeneratorId]}") from exc
    s = generator(tag, args.order)
    _emit({"generator": tag.value, "order": args.order, "series": s.to_json()}, args)
    return EXIT_OK


def cmd_solve(args) -> int:
    cand = _candidate(args)
    cfg = _config(args)
    _emit(
        {
            "config": _run_config(args, cfg),
            "candidate": cand.to_json(),
            "candidateHash": cand.digest,
            "log": list(cand.log),
        },
        args,
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    cand = _candidate(args)
    cfg = _config(args)
    f = build(cand, cfg)
    with mpmath.workprec(cfg.prec):
        values = []
        for r in args.r:
            v = f.evaluate(mpmath.mpf(r), args.method)
            values.append({"r": r, "value": mpmath.nstr(v, args.digits, min_fixed=-4, max_fixed=4)})
    _emit(
        {
            "config": _run_config(args, cfg),
            "candidateHash": cand.digest,
            "side": cand.side,
            "d": cand.d,
            "n": cand.n,
            "method": args.method,
            "digits": args.digits,
            "values": values,
        },
        args,
    )
    return EXIT_OK


def _report_row(rep: bounds.BoundReport, literature: dict | None) -> dict:
    row = {
        "d": rep.d,
        "n_plus": rep.n_plus,
        "n_minus": rep.n_minus,
        "r0": f"{rep.r0:.10g}",
        "bound": bounds.format_bound(rep.bound),
        "max_violation": "" if rep.verify is None else f"{rep.verify.max_violation:.3g}",
    }
    if literature is not None:
        lit = literature["rows"].get(str(rep.d), {})
        row["literature_best_upper"] = lit.get("bestUpper", "")
        row["literature_best_lower"] = lit.get("bestLower", "")
    return row


def cmd_bound(args) -> int:
    cfg = _config(args)
    rep = bounds.packing_bound(args.dim, cfg)
    _emit(
        {
            "config": _run_config(args, cfg),
            "report": rep.to_json(),
            "bound": bounds.format_bound(rep.bound),
            "precisionDigits": 4,
        },
        args,
    )
    return EXIT_OK


def cmd_table(args) -> int:
    cfg = _config(args)
    dims = _dims(args.dims)
    reports = bounds.table(dims, cfg, construct=not args.no_construct)
    literature = bounds.literature_annotations() if args.annotate else None
    rows = [_report_row(r, literature) for r in reports]
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        payload = {"config": _run_config(args, cfg), "rows": rows, "precisionDigits": 4}
        if literature is not None:
            payload["annotations"] = "literature values, not computed: " + literature["description"]
        _emit(payload, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.c is not None:
        try:
            c = Fraction(args.c)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --c value {args.c!r}") from exc
        rec = bounds.sign_verify(args.dim, c, args.grid_max, args.grid_step, args.tol, cfg)
    else:
        c, rec = bounds.choose_mix(args.dim, args.grid_max, args.grid_step, args.tol, cfg)
    _emit(
        {
            "config": _run_config(args, cfg),
            "d": args.dim,
            "c": str(c),
            "gridMax": args.grid_max,
            "gridStep": args.grid_step,
            "verify": rec.to_json(),
        },
        args,
    )
    return EXIT_VIOLATIONS if rec.violations else EXIT_OK


# -- parser -----------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--precision", type=int, default=None, help="working precision in bits")
    common.add_argument("--order", type=int, default=None, help="doubled-exponent truncation")
    common.add_argument("-v", "--verbose", action="store_true")

    cand = argparse.ArgumentParser(add_help=False)
    cand.add_argument("--dim", type=int)
    cand.add_argument("--side", choices=("plus", "minus"))
    cand.add_argument("--n", type=int, default=None, help="force the pole order")
    cand.add_argument("--candidate-file", default=None)

    p = argparse.ArgumentParser(prog="spherebound", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("series", parents=[common])
    s.add_argument("generator")
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("solve", parents=[common, cand])
    s.add_argument("--json", action="store_true", help="alias for --format json")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("eval", parents=[common, cand])
    s.add_argument("--r", type=float, nargs="+", required=True)
    s.add_argument("--method", choices=("auto", "closed", "contour", "limit"), default="auto")
    s.add_argument("--digits", type=int, default=15)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("bound", parents=[common])
    s.add_argument("--dim", type=int, required=True)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("table", parents=[common])
    s.add_argument("--dims", default="8,16,24,48,72,96")
    s.add_argument("--annotate", action="store_true", help="add literature columns from the static data file")
    s.add_argument("--no-construct", action="store_true", help="formula only, skip the f+(0) cross-check")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("verify", parents=[common])
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--c", default=None, help="mixing coefficient p/q (searched when omitted)")
    s.add_argument("--grid-max", type=float, default=6.0)
    s.add_argument("--grid-step", type=float, default=0.01)
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "json", False):
        args.format = "json"
    if args.command == "series" and args.order is None:
        args.order = 16
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Infeasible, ConstructionFailed) as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (EvaluationError, InsufficientTruncation, InsufficientPrecision, ConsistencyError, bounds.BoundError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
