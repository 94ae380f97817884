"""Command-line interface.

Five subcommands: ``table1`` (the built-in model catalog with indices and
ranks), ``curve`` (sampled equality curve export), ``indices`` (empirical
indices of a sample), ``transfer`` (replay a transfer plan with
self-checked direction predictions), and ``cohorts`` (survey CSV to
ranked group report).

Exit codes: 0 success, 1 validation or input error, 2 computation error
(degenerate sample, non-convergence, or a failed prediction self-check).
Every failure prints exactly one ``error: ...`` line to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys

from .curves import (CATALOG, QuadratureConfig, curve_csv, curve_json,
                     curve_samples, rank_models)
from .empirical import (DegenerateSampleError, csv_cell, full_report,
                        make_sample, report_csv_header, report_csv_row)
from .pipeline import (PipelineError, build_cohorts, cohort_reports,
                       load_config, read_records, report_table_csv)
from .quantiles import parse_model_spec
from .transfers import TransferError, evaluate_transfer, parse_plan

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad usage as a one-line error with exit code 1."""

    def error(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _add_common(sub: argparse.ArgumentParser, default_format: str,
                quadrature: bool = False) -> None:
    sub.add_argument("--format", choices=("text", "csv", "json"),
                     default=default_format, help="output format")
    sub.add_argument("--precision", type=int, default=4, metavar="N",
                     help="decimal places in formatted output (default 4)")
    sub.add_argument("--output", metavar="PATH", default=None,
                     help="write to PATH instead of stdout")
    if quadrature:
        sub.add_argument("--panels", type=int, default=512, metavar="N",
                         help="quadrature panels (default 512)")
        sub.add_argument("--nodes", type=int, default=8, metavar="N",
                         help="Gauss-Legendre nodes per panel (default 8)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="medineq",
                     description="Median-based inequality indices")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("table1", parents=[], add_help=True,
                            help="index and rank table of the built-in catalog")
    _add_common(p, "text", quadrature=True)
    p.set_defaults(func=cmd_table1)

    p = commands.add_parser("curve", help="export a sampled equality curve")
    p.add_argument("model", help="model spec, e.g. paretoII:sigma=1,alpha=2")
    p.add_argument("--k", type=int, choices=(1, 2, 3), default=1,
                   help="curve strategy (default 1)")
    p.add_argument("--points", type=int, default=256, metavar="N",
                   help="number of interior grid points (default 256)")
    _add_common(p, "csv", quadrature=True)
    p.set_defaults(func=cmd_curve)

    p = commands.add_parser("indices", help="empirical indices of a sample")
    p.add_argument("values", nargs="*", type=float, help="income values")
    p.add_argument("--input", metavar="PATH", default=None,
                   help="read whitespace-separated values from PATH")
    p.add_argument("--n-total", dest="n_total", type=int, default=None,
                   metavar="N", help="population size n_T if larger than the sample")
    _add_common(p, "text")
    p.set_defaults(func=cmd_indices)

    p = commands.add_parser("transfer", help="replay a transfer plan with self-checks")
    p.add_argument("values", nargs="+", type=float, help="starting sample")
    p.add_argument("--plan", required=True, metavar="PATH",
                   help="plan file: one `L H c` step per line")
    _add_common(p, "csv")
    p.set_defaults(func=cmd_transfer)

    p = commands.add_parser("cohorts", help="survey CSV to ranked group report")
    p.add_argument("data", help="records CSV")
    p.add_argument("config", help="INI config (columns, exchange rates, weights)")
    p.add_argument("--ranks", default="1,2,3", metavar="K[,K...]",
                   help="ranking strategies to include (default 1,2,3)")
    _add_common(p, "csv")
    p.set_defaults(func=cmd_cohorts)
    return parser


def cmd_table1(args: argparse.Namespace) -> int:
    quad = QuadratureConfig(panels=args.panels, nodes=args.nodes)
    entries = list(CATALOG)
    values: dict[str, dict[int, float]] = {label: {} for label, _ in entries}
    ranks: dict[str, dict[int, str]] = {label: {} for label, _ in entries}
    for k in (1, 2, 3):
        for ranked in rank_models(entries, k, quad):
            values[ranked.label][k] = ranked.value
            ranks[ranked.label][k] = ranked.rank_display
    prec = args.precision

    if args.format == "json":
        payload = [{"label": label,
                    "psi1": values[label][1], "psi2": values[label][2],
                    "psi3": values[label][3],
                    "rank1": ranks[label][1], "rank2": ranks[label][2],
                    "rank3": ranks[label][3]}
                   for label, _ in entries]
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
        return 0

    rows = [(label,
             *(f"{values[label][k]:.{prec}f}" for k in (1, 2, 3)),
             *(ranks[label][k] for k in (1, 2, 3)))
            for label, _ in entries]
    if args.format == "csv":
        lines = ["label,psi1,psi2,psi3,rank1,rank2,rank3"]
        lines.extend(",".join((csv_cell(row[0]), *row[1:])) for row in rows)
        _emit("\n".join(lines) + "\n", args.output)
        return 0

    width = max(len(label) for label, _ in entries)
    vw = max(6, prec + 2)
    header = (f"{'label':<{width}}  {'Psi1':>{vw}}  {'Psi2':>{vw}}  {'Psi3':>{vw}}"
              f"  {'rank1':>5}  {'rank2':>5}  {'rank3':>5}")
    lines = [header]
    for label, v1, v2, v3, r1, r2, r3 in rows:
        lines.append(f"{label:<{width}}  {v1:>{vw}}  {v2:>{vw}}  {v3:>{vw}}"
                     f"  {r1:>5}  {r2:>5}  {r3:>5}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_curve(args: argparse.Namespace) -> int:
    model = parse_model_spec(args.model)
    quad = QuadratureConfig(panels=args.panels, nodes=args.nodes)
    samples = curve_samples(model, args.k, args.points, quad)
    content = curve_json(samples) + "\n" if args.format == "json" else curve_csv(samples)
    _emit(content, args.output)
    if args.output:
        print(f"index={samples.index_value:.{args.precision}f}")
    return 0


def cmd_indices(args: argparse.Namespace) -> int:
    if args.input is not None and args.values:
        raise ValueError("give values either inline or with --input, not both")
    if args.input is not None:
        with open(args.input, encoding="utf-8") as handle:
            raw = handle.read().split()
        values = [float(token) for token in raw]
    else:
        values = args.values
    if not values:
        raise ValueError("no income values given")
    sample = make_sample(values)
    report = full_report(sample, n_total=args.n_total)
    prec = args.precision

    if args.format == "json":
        payload = {"label": "sample", "mean": report.mean, "median": report.median,
                   "n_T": report.n_T, "n_P": report.n_P,
                   "G": report.gini, "Z": report.zenga, "D": report.dg,
                   "G2": report.g2, "Psi1": report.psi1, "Psi2": report.psi2,
                   "Psi3": report.psi3}
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
        return 0
    if args.format == "csv":
        text = report_csv_header() + "\n" + report_csv_row("sample", report, prec) + "\n"
        _emit(text, args.output)
        return 0

    pairs = [("n_T", str(report.n_T)), ("n_P", str(report.n_P)),
             ("mean", f"{report.mean:.{prec}f}"), ("median", f"{report.median:.{prec}f}"),
             ("G", f"{report.gini:.{prec}f}"), ("Z", f"{report.zenga:.{prec}f}"),
             ("D", f"{report.dg:.{prec}f}"), ("G2", f"{report.g2:.{prec}f}"),
             ("Psi1", f"{report.psi1:.{prec}f}"), ("Psi2", f"{report.psi2:.{prec}f}"),
             ("Psi3", f"{report.psi3:.{prec}f}")]
    _emit("\n".join(f"{name:<7}{value}" for name, value in pairs) + "\n", args.output)
    return 0


def cmd_transfer(args: argparse.Namespace) -> int:
    with open(args.plan, encoding="utf-8") as handle:
        plan = parse_plan(handle.read())
    current = make_sample(args.values)
    prec = args.precision
    steps = []
    mismatch: tuple[int, int] | None = None
    for i, t in enumerate(plan, start=1):
        try:
            outcome = evaluate_transfer(current, t)
        except TransferError as exc:
            raise TransferError(f"step {i}: {exc}") from exc
        row = {"step": i, "L": t.L, "H": t.H, "c": t.c,
               "psi1": outcome.psi_after[0], "psi2": outcome.psi_after[1],
               "psi3": outcome.psi_after[2],
               "pred": outcome.predicted, "obs": outcome.observed,
               "agree": outcome.consistent}
        steps.append(row)
        if not outcome.consistent and mismatch is None:
            for k in (1, 2, 3):
                if (outcome.predicted[k - 1] is not None
                        and outcome.predicted[k - 1] != outcome.observed[k - 1]):
                    mismatch = (i, k)
                    break
        current = outcome.sample_after

    if args.format == "json":
        payload = [{**row,
                    "c": row["c"],
                    "pred": list(row["pred"]), "obs": list(row["obs"])}
                   for row in steps]
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        lines = ["step,L,H,c,psi1,psi2,psi3,"
                 "pred1,pred2,pred3,obs1,obs2,obs3,agree"]
        for row in steps:
            pred = [p if p is not None else "n/a" for p in row["pred"]]
            lines.append(
                f"{row['step']},{row['L']},{row['H']},{row['c']:.{prec}f},"
                f"{row['psi1']:.{prec}f},{row['psi2']:.{prec}f},{row['psi3']:.{prec}f},"
                f"{pred[0]},{pred[1]},{pred[2]},"
                f"{row['obs'][0]},{row['obs'][1]},{row['obs'][2]},"
                f"{'yes' if row['agree'] else 'no'}")
        _emit("\n".join(lines) + "\n", args.output)

    if mismatch is not None:
        print(f"error: prediction mismatch at step {mismatch[0]} "
              f"(strategy {mismatch[1]})", file=sys.stderr)
        return 2
    return 0


def cmd_cohorts(args: argparse.Namespace) -> int:
    try:
        strategies = tuple(int(token) for token in args.ranks.split(","))
    except ValueError:
        raise ValueError(f"--ranks must be a comma-separated subset of 1,2,3, "
                         f"got {args.ranks!r}") from None
    config = load_config(args.config)
    records = read_records(args.data, config)
    rows = cohort_reports(build_cohorts(records, config), strategies)

    if args.format == "json":
        payload = []
        for row in rows:
            item: dict = {"label": row.label, "n_T": row.n_T, "n_P": row.n_P}
            if row.report is None:
                item["defined"] = False
                item["note"] = row.note
            else:
                r = row.report
                item.update(defined=True, mean=r.mean, median=r.median,
                            G=r.gini, Z=r.zenga, D=r.dg, G2=r.g2,
                            Psi1=r.psi1, Psi2=r.psi2, Psi3=r.psi3,
                            ranks={str(k): row.ranks[k] for k in strategies})
            payload.append(item)
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
        return 0

    _emit(report_table_csv(rows, precision=args.precision, strategies=strategies),
          args.output)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except DegenerateSampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TransferError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
