"""Batch command-line front end with JSON/CSV reports.

Subcommands: ``bnc enum``, ``bnc mobius``, ``mc to-cumulants``,
``mc to-moments``, ``bifree test``, ``fock moment``, ``conj check``,
``fisher run``, ``entropy run``, ``verify all``.  Usage errors exit 2
(argparse), computation failures exit 1 with a JSON error object, success
exits 0.  Output is deterministic for a fixed seed and configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import acceptance
from .balgebra import CPMap, belement_from_json, belement_to_json
from .bnc import BncPartition, ChiWord, enumerate_bnc, mobius_bnc
from .conjvar import (
    PresenceContext,
    VectorCandidate,
    circular_entropy_experiment,
    conj_residual,
    fisher_info,
    fisher_minimization_experiment,
    semicircular_entropy_experiment,
    solve_conjugate,
)
from .fock import BisemicircularModel, make_bisemicircular
from .moments import bifree_test, cumulants_from_moments, moments_from_cumulants
from .words import Monomial

SCHEMA = 1


@dataclass
class RunConfig:
    d: int = 1
    max_order: int = 4
    tolerance: float = 1e-9
    truncation: int | None = None
    seed: int = 0
    output_format: str = "json"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.d > 8:
            raise ValueError("d capped at 8")
        if self.max_order > 8:
            raise ValueError("max_order capped at 8")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return belement_to_json(obj) if obj.ndim == 2 else [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        if abs(obj.imag) < 1e-15:
            return obj.real
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float) and obj != obj:  # NaN guard for JSON
        return None
    return obj


def _emit(report: dict, cfg: RunConfig, csv_rows=None, csv_header=None) -> None:
    report = {"schema": SCHEMA, **report}
    if cfg.output_format == "csv" and csv_rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(csv_header)
        writer.writerows(csv_rows)
        sys.stdout.write(buf.getvalue())
    else:
        json.dump(_jsonable(report), sys.stdout, sort_keys=True)
        sys.stdout.write("\n")


def _load_model(path: str | None, cfg: RunConfig) -> BisemicircularModel:
    if path:
        with open(path) as fh:
            return BisemicircularModel.from_json(json.load(fh))
    eye = CPMap.identity(cfg.d)
    return make_bisemicircular([eye], [eye], max_depth=cfg.truncation)


def _read_table(path: str):
    data = json.load(sys.stdin if path == "-" else open(path))
    chi = ChiWord.from_string(data["chi"])
    table = {}
    for entry in data["entries"]:
        p = BncPartition(entry["partition"], chi)
        table[p] = belement_from_json(entry["value"])
    return chi, table


def _table_report(chi: ChiWord, table: dict) -> dict:
    return {
        "chi": str(chi),
        "entries": [
            {
                "chi": str(chi),
                "partition": [list(b) for b in p.blocks],
                "value": belement_to_json(v),
            }
            for p, v in sorted(table.items(), key=lambda kv: kv[0].blocks)
        ],
    }


# --- subcommand handlers -----------------------------------------------------

def _cmd_bnc_enum(args, cfg: RunConfig) -> int:
    chi = ChiWord.from_string(args.chi)
    parts = enumerate_bnc(chi)
    rows = [(p.n, str(chi), json.dumps([list(b) for b in p.blocks])) for p in parts]
    _emit(
        {"chi": str(chi), "count": len(parts), "partitions": [p.to_json() for p in parts]},
        cfg,
        csv_rows=rows,
        csv_header=("n", "chi", "blocks"),
    )
    return 0


def _cmd_bnc_mobius(args, cfg: RunConfig) -> int:
    chi = ChiWord.from_string(args.chi)
    sigma = BncPartition(json.loads(args.sigma), chi)
    pi = BncPartition(json.loads(args.pi), chi)
    _emit({"chi": str(chi), "value": mobius_bnc(sigma, pi)}, cfg)
    return 0


def _cmd_mc(args, cfg: RunConfig, direction: str) -> int:
    chi, table = _read_table(args.table)
    out = {}
    for p in enumerate_bnc(chi):
        if direction == "to-cumulants":
            out[p] = cumulants_from_moments(table, p)
        else:
            out[p] = moments_from_cumulants(table, p)
    _emit(_table_report(chi, out), cfg)
    return 0


def _cmd_bifree_test(args, cfg: RunConfig) -> int:
    model = _load_model(args.model, cfg)
    rep = bifree_test(
        model.functional, model.symbols, max_order=cfg.max_order, tol=cfg.tolerance
    )
    _emit(rep, cfg)
    return 0 if rep["pass"] else 1


def _cmd_fock_moment(args, cfg: RunConfig) -> int:
    model = _load_model(args.model, cfg)
    word = Monomial([model.symbol(tok) for tok in args.word.split()])
    value = model.functional.expect(word)
    _emit(
        {
            "word": args.word,
            "value": belement_to_json(value),
            "trace": _jsonable(complex(np.trace(value)) / model.dim),
        },
        cfg,
    )
    return 0


def _cmd_conj_check(args, cfg: RunConfig) -> int:
    one = CPMap.identity(1)
    model = make_bisemicircular([one], [])
    s = model.symbol("S1")
    lam = args.lam
    target = model.model.scaled_symbol(s, lam, name="target") if lam != 1.0 else s
    cand = VectorCandidate(
        target, model.model.vector_of(Monomial([s])).scaled(1.0 / lam), model.model
    )
    resid = conj_residual(cand, one, PresenceContext(), model.functional, args.max_n)
    phi = fisher_info([cand])
    tau_sq = model.functional.tau(Monomial([target, target])).real
    rep = {
        "target": f"{lam:g}*semicircular",
        "max_residual": resid,
        "fisher": phi,
        "cramer_rao_product": phi * tau_sq,
        "pass": bool(resid <= cfg.tolerance),
    }
    if args.solve:
        solved, solved_resid = solve_conjugate(
            model.model, target, one, PresenceContext(), max_n=min(args.max_n, 4)
        )
        rep["solver_residual"] = solved_resid
        rep["solver_fisher"] = fisher_info([solved])
    _emit(rep, cfg)
    return 0 if rep["pass"] else 1


def _cmd_fisher_run(args, cfg: RunConfig) -> int:
    if args.experiment != "circular-min":
        raise ValueError(f"unknown experiment {args.experiment!r}")
    rep = fisher_minimization_experiment()
    _emit(rep, cfg)
    return 0 if rep["pass"] else 1


def _cmd_entropy_run(args, cfg: RunConfig) -> int:
    if args.experiment == "semicircular-max":
        rep = semicircular_entropy_experiment()
    elif args.experiment == "circular-pair":
        rep = circular_entropy_experiment()
    else:
        raise ValueError(f"unknown experiment {args.experiment!r}")
    rep = {k: v for k, v in rep.items() if k not in ("pair_report", "lift_report")}
    _emit(rep, cfg)
    return 0 if rep["pass"] else 1


def _cmd_verify_all(args, cfg: RunConfig) -> int:
    # Progress lines (with timings) go to stderr; stdout carries only the
    # byte-stable JSON summary.
    results, ok = acceptance.run_all(
        seed=cfg.seed, emit=lambda line: print(line, file=sys.stderr)
    )
    summary = {
        "pass": ok,
        "seed": cfg.seed,
        "criteria": [
            {"id": r.cid, "name": r.name, "pass": r.passed, "detail": r.detail}
            for r in results
        ],
    }
    if cfg.output_format == "csv":
        rows = [(r.cid, r.name, r.passed, r.detail) for r in results]
        _emit(summary, cfg, csv_rows=rows, csv_header=("id", "name", "pass", "detail"))
    else:
        _emit(summary, cfg)
    return 0 if ok else 1


def _add_config_options(p: argparse.ArgumentParser, default: bool = False) -> None:
    # On leaf subcommands the defaults are suppressed so that values given at
    # the top level are not overwritten.
    d = (lambda v: v) if default else (lambda v: argparse.SUPPRESS)
    p.add_argument("--output-format", choices=("json", "csv"), default=d("json"))
    p.add_argument("--tolerance", type=float, default=d(1e-9))
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--d", type=int, default=d(1), help="coefficient dimension")
    p.add_argument("--max-order", type=int, default=d(4))
    p.add_argument("--truncation", type=int, default=d(None))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bifree",
        description="Computational engine for bi-free probability with amalgamation.",
    )
    _add_config_options(parser, default=True)
    sub = parser.add_subparsers(dest="group", required=True)

    p_bnc = sub.add_parser("bnc", help="bi-non-crossing lattice").add_subparsers(
        dest="cmd", required=True
    )
    p = p_bnc.add_parser("enum", help="enumerate BNC(chi)")
    p.add_argument("--chi", required=True)
    _add_config_options(p)
    p.set_defaults(func=_cmd_bnc_enum)
    p = p_bnc.add_parser("mobius", help="Moebius function value")
    p.add_argument("--chi", required=True)
    p.add_argument("--sigma", required=True, help="JSON block list")
    p.add_argument("--pi", required=True, help="JSON block list")
    _add_config_options(p)
    p.set_defaults(func=_cmd_bnc_mobius)

    p_mc = sub.add_parser("mc", help="moment/cumulant tables").add_subparsers(
        dest="cmd", required=True
    )
    p = p_mc.add_parser("to-cumulants", help="convolve a moment table")
    p.add_argument("--table", required=True, help="JSON file or - for stdin")
    _add_config_options(p)
    p.set_defaults(func=lambda a, c: _cmd_mc(a, c, "to-cumulants"))
    p = p_mc.add_parser("to-moments", help="sum a cumulant table")
    p.add_argument("--table", required=True, help="JSON file or - for stdin")
    _add_config_options(p)
    p.set_defaults(func=lambda a, c: _cmd_mc(a, c, "to-moments"))

    p_bf = sub.add_parser("bifree", help="bi-freeness checks").add_subparsers(
        dest="cmd", required=True
    )
    p = p_bf.add_parser("test", help="scan mixed cumulants")
    p.add_argument("--model", default=None, help="model spec JSON file")
    _add_config_options(p)
    p.set_defaults(func=_cmd_bifree_test)

    p_fock = sub.add_parser("fock", help="Fock-space models").add_subparsers(
        dest="cmd", required=True
    )
    p = p_fock.add_parser("moment", help="expectation of an operator word")
    p.add_argument("--word", required=True, help='e.g. "S1 S1 D1 D1"')
    p.add_argument("--model", default=None, help="model spec JSON file")
    _add_config_options(p)
    p.set_defaults(func=_cmd_fock_moment)

    p_conj = sub.add_parser("conj", help="conjugate variables").add_subparsers(
        dest="cmd", required=True
    )
    p = p_conj.add_parser("check", help="verify the semicircular conjugate variable")
    p.add_argument("--lam", type=float, default=1.0, help="scale of the target")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--solve", action="store_true", help="also run the least-squares solver")
    _add_config_options(p)
    p.set_defaults(func=_cmd_conj_check)

    p_fisher = sub.add_parser("fisher", help="Fisher information").add_subparsers(
        dest="cmd", required=True
    )
    p = p_fisher.add_parser("run", help="run a Fisher experiment")
    p.add_argument("--experiment", required=True, choices=("circular-min",))
    _add_config_options(p)
    p.set_defaults(func=_cmd_fisher_run)

    p_ent = sub.add_parser("entropy", help="entropy").add_subparsers(
        dest="cmd", required=True
    )
    p = p_ent.add_parser("run", help="run an entropy experiment")
    p.add_argument(
        "--experiment", required=True, choices=("semicircular-max", "circular-pair")
    )
    _add_config_options(p)
    p.set_defaults(func=_cmd_entropy_run)

    p_ver = sub.add_parser("verify", help="acceptance suite").add_subparsers(
        dest="cmd", required=True
    )
    p = p_ver.add_parser("all", help="run every acceptance criterion")
    _add_config_options(p)
    p.set_defaults(func=_cmd_verify_all)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            d=args.d,
            max_order=args.max_order,
            tolerance=args.tolerance,
            truncation=args.truncation,
            seed=args.seed,
            output_format=args.output_format,
        )
        return args.func(args, cfg)
    except BrokenPipeError:  # pragma: no cover
        return 1
    except Exception as exc:  # computation failure -> exit 1 with JSON error
        json.dump(
            {"schema": SCHEMA, "error": f"{type(exc).__name__}: {exc}"}, sys.stdout
        )
        sys.stdout.write("\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
