"""Command-line entry point: ``ovalis <subcommand>``.

Exit codes: 0 on success, 1 on a table mismatch or a failing certificate,
2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from ovalis.corpus import (
    ROW_COUNTS,
    CorpusError,
    emit_table,
    diff_tables,
    load_corpus,
)
from ovalis.ledger import (
    LedgerError,
    LedgerReport,
    check_paths,
    shipped_certificate_dir,
)
from ovalis.orientation import FitError, fit_coefficients
from ovalis.pipeline import derive_all, derive_table, fit_chain_placement, PipelineError

ENUMERATION_TABLES = {("EEO", False): 1, ("EEO", True): 7, ("EOO", False): 11, ("OOO", False): 17}


def _table_id(text: str) -> int:
    try:
        tid = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a table number: {text!r}") from None
    if tid not in ROW_COUNTS:
        raise argparse.ArgumentTypeError(f"no table {tid} (expected 1..18)")
    return tid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ovalis",
        description="Complex schemes of degree-9 M-curves with three nests: tables and certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("enumerate", help="print the admissible short complex schemes")
    p.add_argument("--class", dest="parity_class", choices=("EEO", "EOO", "OOO"), help="restrict to one parity class")
    p.add_argument("--jump", action="store_true", help="even, even, odd schemes with an odd jump")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")

    p = sub.add_parser("derive-table", help="derive one table from the formulas and filters")
    p.add_argument("table", type=_table_id)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")

    p = sub.add_parser("diff-all", help="compare every derived table with the corpus")
    p.add_argument("--corpus", help="corpus directory (default: $OVALIS_CORPUS or the shipped tables)")

    p = sub.add_parser("fit-coefficients", help="fit the orientation coefficients and the chain placement")
    p.add_argument("--corpus", help="corpus directory")

    p = sub.add_parser("check-certificates", help="recompute the proof certificates")
    p.add_argument("files", nargs="*", help="certificate files (default: all shipped certificates)")

    p = sub.add_parser("emit", help="write derived tables as TSV or JSON")
    p.add_argument("--format", choices=("tsv", "json"), required=True)
    p.add_argument("--table", type=_table_id, action="append", help="table to emit (repeatable; default all)")
    p.add_argument("--output", help="directory to write table files into instead of stdout")
    return parser


def _cmd_enumerate(args, out) -> int:
    keys = [k for k in ENUMERATION_TABLES if args.parity_class in (None, k[0]) and (not args.jump or k[1])]
    if not keys:
        print(f"no jump schemes are tabulated for class {args.parity_class}", file=sys.stderr)
        return 2
    tables = [derive_table(ENUMERATION_TABLES[k]) for k in keys]
    if args.format == "json":
        out.write(json.dumps([json.loads(emit_table(t, "json")) for t in tables], indent=2) + "\n")
    else:
        out.write("".join(emit_table(t, "tsv") for t in tables))
    return 0


def _cmd_derive(args, out) -> int:
    out.write(emit_table(derive_table(args.table), args.format))
    return 0


def _cmd_diff_all(args, out) -> int:
    corpus = load_corpus(args.corpus)
    for w in corpus.warnings:
        print(f"warning: {w}", file=sys.stderr)
    derived = derive_all()
    failed = 0
    for tid in sorted(ROW_COUNTS):
        entries = diff_tables(derived[tid], corpus[tid])
        if entries:
            failed += 1
            out.write(f"table {tid}: {len(entries)} difference(s)\n")
            for e in entries:
                out.write(f"  row {e.row_key} column {e.column}: expected {e.expected} got {e.got}\n")
        else:
            out.write(f"table {tid}: ok\n")
    out.write(f"{len(ROW_COUNTS) - failed}/{len(ROW_COUNTS)} tables match\n")
    return 1 if failed else 0


def _cmd_fit(args, out) -> int:
    corpus = load_corpus(args.corpus)
    coeffs = fit_coefficients(corpus)
    out.write(coeffs.dump())
    placement = fit_chain_placement(corpus, coeffs)
    for (sign, kind), p in sorted(placement.items()):
        s = "+" if sign > 0 else "-"
        out.write(f"placement[({s},{kind})]=triangle {p.triangle} apex {p.apex}\n")
    return 0


def _resolve_certificate(name: str) -> Path:
    p = Path(name)
    if p.is_file():
        return p
    shipped = shipped_certificate_dir() / p.name
    if shipped.is_file():
        return Path(str(shipped))
    raise LedgerError(f"no certificate file {name}")


def _print_report(report: LedgerReport, names: dict, out) -> None:
    for cid, res in sorted(report.results.items()):
        status = "pass" if res.passed else "FAIL"
        out.write(f"{status} {names.get(cid, res.source)} ({cid})\n")
        for err in res.errors:
            out.write(f"  {err}\n")
        unverified = [d for d in res.requires if d in report.results and not report.verified(d)]
        if res.passed and unverified:
            out.write(f"  depends on failing {', '.join(unverified)}\n")
    axioms = report.axiom_report()
    out.write(f"axioms used: {len(axioms)}\n")
    for ref, cid, cand in axioms:
        out.write(f"  {ref} in {cid} ({cand})\n")
    assumptions = report.assumption_report()
    out.write(f"assumptions: {len(assumptions)}\n")
    for cid, text in assumptions:
        out.write(f"  {cid}: {text}\n")


def _cmd_check(args, out) -> int:
    if args.files:
        paths = [_resolve_certificate(f) for f in args.files]
    else:
        root = shipped_certificate_dir()
        paths = sorted((Path(str(p)) for p in root.iterdir() if p.name.endswith(".cert")), key=lambda p: p.name)
    report = check_paths(paths)
    names = {}
    for p in paths:
        for cid, res in report.results.items():
            if res.source == p.name:
                names[cid] = p.name
    _print_report(report, names, out)
    ok = all(r.passed for r in report.results.values())
    return 0 if ok else 1


def _cmd_emit(args, out) -> int:
    ids = sorted(set(args.table)) if args.table else sorted(ROW_COUNTS)
    tables = {tid: derive_table(tid) for tid in ids}
    if args.output:
        d = Path(args.output)
        d.mkdir(parents=True, exist_ok=True)
        for tid, t in tables.items():
            (d / f"table-{tid:02d}.{args.format}").write_text(emit_table(t, args.format), encoding="utf-8")
        out.write(f"wrote {len(tables)} table(s) to {d}\n")
    elif args.format == "json":
        out.write(json.dumps([json.loads(emit_table(t, "json")) for t in tables.values()], indent=2) + "\n")
    else:
        out.write("".join(emit_table(t, "tsv") for t in tables.values()))
    return 0


COMMANDS = {
    "enumerate": _cmd_enumerate,
    "derive-table": _cmd_derive,
    "diff-all": _cmd_diff_all,
    "fit-coefficients": _cmd_fit,
    "check-certificates": _cmd_check,
    "emit": _cmd_emit,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (CorpusError, FitError, PipelineError, LedgerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
