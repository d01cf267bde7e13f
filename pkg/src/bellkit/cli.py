"""Batch command-line front end.

Exit status: 0 on success, 1 on usage errors, 2 when a computation limit
is exceeded or a computation fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Any, Sequence, TextIO

import numpy as np

from . import families, local, optimizer, shb
from .core import (BellError, CorrelationInequality, LimitExceeded, ProbabilityInequality,
                   inequality_to_dict, loads_inequality)

SEED_ENV = "BELLKIT_SEED"
PLOT_KINDS = ("visibility_vs_n", "detection_vs_theta", "bellvalue_vs_eta")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    restarts: int | None = None
    tol: float = 1e-12
    max_iters: int = 10_000
    format: str = "json"
    precision: int = 6
    output: str | None = None

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")
        if not 1 <= self.precision <= 15:
            raise UsageError("--precision must be between 1 and 15")

    def optimizer(self) -> optimizer.OptimizerConfig:
        return optimizer.OptimizerConfig(self.restarts, self.tol, self.max_iters, self.seed)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [_theta(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _theta(text: str) -> float:
    return math.pi / 4 if text.strip() == "max" else float(text)


def build_parser() -> argparse.ArgumentParser:
    default_seed = int(os.environ.get(SEED_ENV, "0"))
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed)
    common.add_argument("--restarts", type=int)
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--max-iters", type=int, default=10_000)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--precision", type=int, default=6)
    common.add_argument("--output", "-o")

    source = _Parser(add_help=False)
    source.add_argument("--name", help="catalog name, e.g. CHSH, AS6, D5_2, S3x4")
    source.add_argument("--file", help="inequality JSON file")

    p = _Parser(prog="bellkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("catalog", parents=[common], help="list or dump catalog inequalities")
    c.add_argument("--name")

    g = sub.add_parser("gen", parents=[common], help="generate an AS_n or D inequality")
    g.add_argument("--family", choices=("as", "d"), required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--row", type=_int_list, help="first row for the D family")

    sub.add_parser("bound", parents=[common, source], help="exact local bound")

    f = sub.add_parser("facet", parents=[common, source], help="facet certification")
    f.add_argument("--space", choices=("full", "correlation"), default="full")

    q = sub.add_parser("qvalue", parents=[common, source], help="see-saw quantum value")
    q.add_argument("--dim", type=int, default=3)

    v = sub.add_parser("visibility", parents=[common, source], help="visibility thresholds")
    v.add_argument("--family", choices=("as",))
    v.add_argument("--n", type=_int_list)
    v.add_argument("--dim", type=int, default=2)

    d = sub.add_parser("detection", parents=[common, source], help="detection-efficiency threshold")
    d.add_argument("--theta", type=_theta, default=math.pi / 4)
    mode = d.add_mutually_exclusive_group()
    mode.add_argument("--symmetric", action="store_true")
    mode.add_argument("--eta-b", type=float)

    s = sub.add_parser("shb", parents=[common], help="guessing game with a joker")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--oracle", action="store_true", help="also run the brute-force local oracle")
    s.add_argument("--export", action="store_true", help="emit the inequality JSON instead")

    pl = sub.add_parser("plot", parents=[common], help="CSV data for external plotting")
    pl.add_argument("--kind", choices=PLOT_KINDS, required=True)
    pl.add_argument("--name", default="CHSH")
    pl.add_argument("--n", type=_int_list, default=[2, 4, 6, 8, 10])
    pl.add_argument("--theta", type=_float_list)
    pl.add_argument("--eta", type=_float_list)
    return p


# --- output -------------------------------------------------------------------

def _round(value: Any, precision: int) -> Any:
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.{precision}g}")
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {k: _round(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v, precision) for v in value]
    if isinstance(value, np.ndarray):
        return _round(value.tolist(), precision)
    return value


def emit(result: dict | list[dict], cfg: RunConfig, out: TextIO) -> None:
    result = _round(result, cfg.precision)
    if cfg.format == "json":
        out.write(json.dumps(result) + "\n")
        return
    rows = result if isinstance(result, list) else [result]
    header = list(rows[0]) if rows else []
    writer = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v
                         for k, v in row.items()})


# --- commands -----------------------------------------------------------------

def _load(args) -> CorrelationInequality | ProbabilityInequality:
    if bool(args.name) == bool(args.file):
        raise UsageError("give exactly one of --name or --file")
    if args.name:
        try:
            return families.catalog(args.name)
        except BellError as exc:
            raise UsageError(str(exc))
    try:
        with open(args.file) as fh:
            return loads_inequality(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc}")
    except (json.JSONDecodeError, BellError) as exc:
        raise UsageError(f"{args.file}: {exc}")


def _ensure_bound(ineq):
    if ineq.bound is not None:
        return ineq
    if isinstance(ineq, CorrelationInequality):
        return ineq.with_bound(local.local_bound_correlation(ineq))
    return ineq.with_bound(local.local_bound_probability(ineq))


def _require_correlation(ineq) -> CorrelationInequality:
    if not isinstance(ineq, CorrelationInequality):
        raise UsageError(f"{ineq.name} is not a correlation inequality")
    return ineq


def _fraction_out(q):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def cmd_catalog(args, cfg):
    if args.name:
        try:
            return inequality_to_dict(families.catalog(args.name))
        except BellError as exc:
            raise UsageError(str(exc))
    return [{"name": n, "bound": _fraction_out(families.catalog(n).bound)}
            for n in families.CATALOG_NAMES]


def cmd_gen(args, cfg):
    if args.family == "as":
        if args.n is None:
            raise UsageError("--family as needs --n")
        try:
            fam = families.FamilySpec("AS", args.n)
        except BellError as exc:
            raise UsageError(str(exc))
    else:
        if not args.row:
            raise UsageError("--family d needs --row")
        fam = families.FamilySpec("D", len(args.row), tuple(args.row))
    return inequality_to_dict(fam.build())


def cmd_bound(args, cfg):
    ineq = _load(args)
    if isinstance(ineq, CorrelationInequality):
        bound = local.local_bound_correlation(ineq)
    else:
        bound = local.local_bound_probability(ineq)
    return {"name": ineq.name, "bound": _fraction_out(bound)}


def cmd_facet(args, cfg):
    ineq = _ensure_bound(_load(args))
    return {"name": ineq.name, **local.facet_check(ineq, args.space).to_dict()}


def cmd_qvalue(args, cfg):
    ineq = _require_correlation(_load(args))
    res = optimizer.seesaw_value(ineq, args.dim, cfg.optimizer())
    geo = optimizer.geometry_report(res.strategy)
    return {"name": ineq.name, "dim": args.dim, "value": res.value,
            "planar": geo.planar, "strategy": res.strategy.to_dict()}


def cmd_visibility(args, cfg):
    if args.family:
        if not args.n:
            raise UsageError("--family as needs --n")
        try:
            targets = [families.gen_as(n) for n in args.n]
        except BellError as exc:
            raise UsageError(str(exc))
    else:
        targets = [_ensure_bound(_require_correlation(_load(args)))]
    rows = []
    for ineq in targets:
        res = optimizer.visibility_threshold(ineq, args.dim, cfg.optimizer())
        rows.append({"n": ineq.m_a, "name": ineq.name, "visibility": res.visibility,
                     "quantum_value": res.quantum_value, "bound": res.bound,
                     "bound_conjectured": res.conjectured})
    return rows


def cmd_detection(args, cfg):
    ineq = _ensure_bound(_require_correlation(_load(args)))
    if args.eta_b is not None:
        res = optimizer.detection_threshold(ineq, args.theta, "fixed_b", args.eta_b, cfg.optimizer())
    else:
        res = optimizer.detection_threshold(ineq, args.theta, "symmetric", cfg=cfg.optimizer())
    out = {"name": ineq.name, "theta": args.theta,
           "shape": "symmetric" if args.eta_b is None else "fixed_b",
           "eta_star": res.eta_star}
    if args.eta_b is not None:
        out["eta_b"] = args.eta_b
    return out


def cmd_shb(args, cfg):
    try:
        ineq = shb.shb_inequality(args.n, args.m)
    except LimitExceeded:
        raise
    except BellError as exc:
        raise UsageError(str(exc))
    if args.export:
        ineq = ineq.with_bound(local.local_bound_probability(ineq))
        return inequality_to_dict(ineq)
    out = {"n": args.n, "m": args.m,
           "local_bound": _fraction_out(local.local_bound_probability(ineq)),
           "formula": shb.shb_local_formula(args.n)}
    if args.oracle:
        out["oracle"] = shb.shb_local_oracle(args.n, args.m)
    if args.n == 2 and 2 <= args.m <= 12:
        out["quantum"] = shb.shb_quantum_score(args.m).score
    return out


def emit_plot_data(kind: str, cfg: RunConfig, *, name: str = "CHSH", ns: Sequence[int] = (2, 4, 6, 8, 10),
                   thetas: Sequence[float] | None = None,
                   etas: Sequence[float] | None = None) -> list[dict]:
    """Numeric table for one of the supported plots."""
    opt = cfg.optimizer()
    if kind == "visibility_vs_n":
        rows = []
        for n in ns:
            res = optimizer.visibility_threshold(families.gen_as(n), 2, opt)
            rows.append({"n": n, "visibility": res.visibility})
        return rows
    ineq = families.catalog(name)
    if kind == "detection_vs_theta":
        thetas = thetas or [math.pi / 4, 0.5, 0.3, 0.1]
        if any(not 0 < t <= math.pi / 4 + 1e-15 for t in thetas):
            raise UsageError("theta values must lie in (0, pi/4]")
        return [{"theta": t, "eta_star": optimizer.detection_threshold(ineq, t, cfg=opt).eta_star}
                for t in thetas]
    if kind == "bellvalue_vs_eta":
        etas = etas or [1.0, 0.9, 2 * (math.sqrt(2) - 1), 0.7]
        if any(not 0 <= e <= 1 for e in etas):
            raise UsageError("eta values must lie in [0, 1]")
        theta = thetas[0] if thetas else math.pi / 4
        rows = []
        for e in etas:
            best = optimizer.optimize_detection(ineq, theta, optimizer.DetectionModel(e, e), opt)
            rows.append({"eta": e, "value": best.value})
        return rows
    raise UsageError(f"unknown plot kind {kind!r}")


def cmd_plot(args, cfg):
    return emit_plot_data(args.kind, cfg, name=args.name, ns=args.n, thetas=args.theta, etas=args.eta)


COMMANDS = {"catalog": cmd_catalog, "gen": cmd_gen, "bound": cmd_bound, "facet": cmd_facet,
            "qvalue": cmd_qvalue, "visibility": cmd_visibility, "detection": cmd_detection,
            "shb": cmd_shb, "plot": cmd_plot}


def run(argv: Sequence[str] | None = None, out: TextIO | None = None,
        err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig(args.seed, args.restarts, args.tol, args.max_iters, args.format,
                        args.precision, args.output)
        result = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        err.write(parser.format_usage())
        err.write(f"{exc}\n")
        return 1
    except (LimitExceeded, BellError, ArithmeticError) as exc:
        err.write(f"bellkit: computation error: {exc}\n")
        return 2
    if cfg.output:
        buf = io.StringIO()
        emit(result, cfg, buf)
        with open(cfg.output, "w") as fh:
            fh.write(buf.getvalue())
    else:
        emit(result, cfg, out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
