"""Command-line surface: mass tables, weight tables, transforms, PMF slice
comparison, the Markov limit solver, and the two experiment reports.

Output goes to stdout (or --out PATH) as CSV with a header line or as a
single JSON object.  Floats are printed with 17 significant digits so file
round-trips are lossless.  Exit status: 0 success, 1 usage error, 2
domain/validation error, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .binomial_kernel import PMFParams, pmf_row
from .exceptions import (
    ConvergenceError,
    HorizonError,
    MatrixValidationError,
    ParameterDomainError,
    PreconditionError,
)
from .markov import limit_matrix, load_matrix_csv, validate
from .sequences import (
    GeneratorSpec,
    probe_open_problem,
    run_table1,
    sequence_from_spec,
)
from .transforms import binomial_prefix, cesaro_prefix, pstar_prefix, weights

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_NO_CONVERGENCE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on its own; route everything through the
    # usage-error path instead so the documented exit codes hold.
    def error(self, message):
        raise _UsageError(message)


@dataclass
class _Payload:
    command: str
    params: dict
    columns: list
    rows: list
    report: dict | None = None
    notes: list = field(default_factory=list)  # informational stderr lines


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _render(payload: _Payload, fmt: str) -> str:
    if fmt == "json":
        body = {"command": payload.command, "params": _jsonable(payload.params)}
        if payload.report is not None:
            body["report"] = _jsonable(payload.report)
        else:
            body["rows"] = _jsonable([list(r) for r in payload.rows])
            body["columns"] = list(payload.columns)
        return json.dumps(body) + "\n"
    lines = [",".join(payload.columns)]
    for row in payload.rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="summakit", description="summability transforms toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--output", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default=None, metavar="PATH", help="write here instead of stdout")

    sp = sub.add_parser("pmf", help="binomial mass table for fixed n, p")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    common(sp)

    sp = sub.add_parser("weights", help="transform weight table for fixed n, p")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    common(sp)

    sp = sub.add_parser("transform", help="transform prefix of a named sequence family")
    sp.add_argument(
        "--family",
        required=True,
        choices=("alternating01", "geometric", "signed_linear", "islets", "spikes"),
    )
    sp.add_argument("--a", type=float, default=None, help="geometric ratio")
    sp.add_argument("--C", type=float, default=None, help="spike spacing factor")
    sp.add_argument("--height-scale", type=float, default=1.0, help="spike height multiplier")
    sp.add_argument("--kind", required=True, choices=("cesaro", "binomial", "pstar"))
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--horizon", type=int, required=True)
    common(sp)

    sp = sub.add_parser("compare", help="aligned PMF slices of two binomial weightings")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    common(sp)

    sp = sub.add_parser("markov-limit", help="limit matrix of a stochastic matrix CSV")
    sp.add_argument("matrix_csv", help="header-free CSV, one matrix row per line")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--max-squarings", type=int, default=64)
    sp.add_argument("--row-tol", type=float, default=1e-12)
    common(sp)

    sp = sub.add_parser("table1", help="transform implication grid experiment")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--horizon", type=int, required=True)
    common(sp)

    sp = sub.add_parser("explore", help="spike-sequence probe of the p-vs-q question")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--C", type=float, required=True)
    sp.add_argument("--height-scale", type=float, default=1.0)
    sp.add_argument("--horizon", type=int, required=True)
    common(sp)

    return parser


def _cmd_pmf(args) -> _Payload:
    row = pmf_row(PMFParams(args.n, args.p)).mass
    return _Payload(
        command="pmf",
        params={"n": args.n, "p": args.p},
        columns=["i", "mass"],
        rows=[(i, row[i]) for i in range(args.n + 1)],
    )


def _cmd_weights(args) -> _Payload:
    table = weights(args.n, args.p)
    return _Payload(
        command="weights",
        params={"n": args.n, "p": args.p},
        columns=["i", "weight"],
        rows=[(i, table.weights[i]) for i in range(args.n + 1)],
    )


def _family_spec(args) -> GeneratorSpec:
    kwargs = {}
    if args.family == "geometric":
        if args.a is None:
            raise _UsageError("--a is required for the geometric family")
        kwargs["a"] = args.a
    if args.family == "spikes":
        if args.C is None:
            raise _UsageError("--C is required for the spikes family")
        kwargs["C"] = args.C
        kwargs["height_scale"] = args.height_scale
    return GeneratorSpec(args.family, **kwargs)


def _cmd_transform(args) -> _Payload:
    spec = _family_spec(args)
    seq = sequence_from_spec(spec)
    if args.kind == "cesaro":
        prefix = cesaro_prefix(seq, args.horizon)
    else:
        if args.p is None:
            raise _UsageError(f"--p is required for the {args.kind} transform")
        fn = binomial_prefix if args.kind == "binomial" else pstar_prefix
        prefix = fn(seq, args.p, args.horizon)
    params = {"family": spec.label, "kind": args.kind, "horizon": args.horizon}
    if prefix.p is not None:
        params["p"] = prefix.p
    return _Payload(
        command="transform",
        params=params,
        columns=["n", "value"],
        rows=[(n, prefix.values[n]) for n in range(args.horizon + 1)],
    )


def _cmd_compare(args) -> _Payload:
    p, q, n = args.p, args.q, args.n
    if not p < q:
        raise _UsageError(f"compare requires p < q, got p={p!r}, q={q!r}")
    row_p = pmf_row(PMFParams(int(n / p), p)).mass
    row_q = pmf_row(PMFParams(int(n / q), q)).mass
    lo = max(0, math.floor(n - 5.0 * math.sqrt(n)))
    hi = math.ceil(n + 5.0 * math.sqrt(n))

    def at(row, i):
        return float(row[i]) if i < len(row) else 0.0

    measured = max(at(row_p, i) for i in range(lo, hi + 1)) / max(
        at(row_q, i) for i in range(lo, hi + 1)
    )
    predicted = math.sqrt((1.0 - q) / (1.0 - p))
    rows = [
        (i, at(row_p, i), at(row_q, i), measured, predicted) for i in range(lo, hi + 1)
    ]
    return _Payload(
        command="compare",
        params={"p": p, "q": q, "n": n},
        columns=["i", "mass_p", "mass_q", "peak_ratio_measured", "peak_ratio_predicted"],
        rows=rows,
    )


def _cmd_markov_limit(args) -> _Payload:
    P = validate(load_matrix_csv(args.matrix_csv), row_tol=args.row_tol)
    report = limit_matrix(P, tol=args.tol, max_squarings=args.max_squarings)
    A = report.A.matrix
    dim = report.A.dim
    diag = (
        f"iterations={report.iterations} residual_fix={report.residual_fix:.3e} "
        f"residual_idem={report.residual_idem:.3e}"
    )
    return _Payload(
        command="markov-limit",
        params={
            "matrix_csv": args.matrix_csv,
            "tol": args.tol,
            "max_squarings": args.max_squarings,
        },
        columns=[f"c{j}" for j in range(dim)],
        rows=[tuple(A[i]) for i in range(dim)],
        report={
            "A": A,
            "iterations": report.iterations,
            "residual_fix": report.residual_fix,
            "residual_idem": report.residual_idem,
        },
        notes=[diag],
    )


def _verdict_dict(v):
    return {"status": v.status, "value": v.value, "window": v.window, "tol": v.tol}


def _cmd_table1(args) -> _Payload:
    if not args.p < args.q:
        raise _UsageError(f"table1 requires p < q, got p={args.p!r}, q={args.q!r}")
    report = run_table1(args.p, args.q, args.horizon)
    columns = [
        "family",
        "source",
        "target",
        "relation",
        "outcome",
        "source_status",
        "source_value",
        "target_status",
        "target_value",
    ]
    rows = [
        (
            c.family,
            c.source,
            c.target,
            c.relation,
            c.outcome,
            c.source_verdict.status,
            "" if c.source_verdict.value is None else c.source_verdict.value,
            c.target_verdict.status,
            "" if c.target_verdict.value is None else c.target_verdict.value,
        )
        for c in report.cells
    ]
    body = {
        "p": report.p,
        "q": report.q,
        "horizon": report.horizon,
        "contradictions": report.contradictions,
        "verdicts": {
            fam: {t: _verdict_dict(v) for t, v in per.items()}
            for fam, per in report.verdicts.items()
        },
        "cells": [
            {
                "family": c.family,
                "source": c.source,
                "target": c.target,
                "relation": c.relation,
                "outcome": c.outcome,
            }
            for c in report.cells
        ],
        "witnesses": [
            {"family": c.family, "source": c.source, "target": c.target} for c in report.witnesses
        ],
        "pq_witness": report.pq_witness,
    }
    return _Payload(
        command="table1",
        params={"p": args.p, "q": args.q, "horizon": args.horizon},
        columns=columns,
        rows=rows,
        report=body,
    )


def _cmd_explore(args) -> _Payload:
    if not args.p < args.q:
        raise _UsageError(f"explore requires p < q, got p={args.p!r}, q={args.q!r}")
    report = probe_open_problem(
        args.p, args.q, args.C, args.horizon, height_scale=args.height_scale
    )
    rows = [
        (s.series, s.ordinal, s.spike_index, s.eval_index, s.value) for s in report.samples
    ]
    body = {
        "p": report.p,
        "q": report.q,
        "C": report.C,
        "height_scale": report.height_scale,
        "horizon": report.horizon,
        "amplitude_p": report.amplitude_p,
        "amplitude_q": report.amplitude_q,
        "samples": [
            {
                "series": s.series,
                "ordinal": s.ordinal,
                "spike_index": s.spike_index,
                "eval_index": s.eval_index,
                "value": s.value,
            }
            for s in report.samples
        ],
    }
    return _Payload(
        command="explore",
        params={
            "p": args.p,
            "q": args.q,
            "C": args.C,
            "height_scale": args.height_scale,
            "horizon": args.horizon,
        },
        columns=["series", "ordinal", "spike_index", "eval_index", "value"],
        rows=rows,
        report=body,
    )


_HANDLERS = {
    "pmf": _cmd_pmf,
    "weights": _cmd_weights,
    "transform": _cmd_transform,
    "compare": _cmd_compare,
    "markov-limit": _cmd_markov_limit,
    "table1": _cmd_table1,
    "explore": _cmd_explore,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        payload = _HANDLERS[args.command](args)
    except _UsageError as exc:
        print(f"summakit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterDomainError, PreconditionError, MatrixValidationError, HorizonError) as exc:
        print(f"summakit: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"summakit: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE

    text = _render(payload, args.output)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    for note in payload.notes:
        print(note, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
