"""Command-line front door.

Four subcommands:

    classify   manifest of conversion records -> outcome table + verdicts
    ops        three corpus directories -> operator-set report + H1 verdict
    seqs       three corpus directories -> sequence regions + H2 verdict
    taxonomy   failure-record CSV -> marginal or joint tables

Output is deterministic: identical inputs and flags produce a
byte-identical payload.  Progress and skip notices go to stderr, never
into the payload.  Exit codes: 0 for a completed run (mismatches and
rejected hypotheses are findings, not failures), 1 when --fail-on-mismatch
fires, 2 on I/O, parse or usage errors.  --lenient downgrades unreadable
corpus files to skip notices.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .corpora import load_corpus_dir
from .difftest import (
    BEHAVIOURAL_DIFFERENCE,
    TolerancePolicy,
    classify_record,
    load_manifest,
    summarize,
)
from .errors import AuditError
from .opsets import evaluate_h1, op_set_report
from .sequences import (
    DEFAULT_MIN_SEQ_LEN,
    REGION_ORDER,
    H2Thresholds,
    PathBudget,
    sequence_report,
)
from .taxonomy import MODES, joint, marginal, parse_records
from .util import render_columns


@dataclass
class AuditConfig:
    """Knobs shared across commands; fractions live in (0, 1]."""

    threshold: float = 1e-7
    nan_equal: bool = True
    h1_overlap_fraction: float = 0.9
    h2_reject_min_support: int = 2
    h2_support_fraction: float = 0.5
    min_seq_len: int = DEFAULT_MIN_SEQ_LEN
    max_paths_per_model: int = 10_000


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def _json_payload(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _hypothesis_json(verdict) -> dict:
    return {
        "hypothesis": verdict.hypothesis,
        "outcome": verdict.outcome,
        "evidence": verdict.evidence,
        "counts": verdict.counts,
    }


def cmd_classify(args: argparse.Namespace) -> int:
    policy = TolerancePolicy(threshold=args.threshold, nan_equal=not args.nan_unequal)
    records = load_manifest(args.manifest)
    verdicts = [(classify_record(r, policy), r.converter, r.kind) for r in records]
    table = summarize(verdicts)
    verdict_rows = sorted(
        (
            {
                "model_id": v.model_id,
                "category": v.category,
                "max_abs_diff": v.max_abs_diff,
                "reason": v.reason,
            }
            for v, _, _ in verdicts
        ),
        key=lambda row: row["model_id"],
    )
    if args.verdicts:
        lines = "".join(json.dumps(row) + "\n" for row in verdict_rows)
        Path(args.verdicts).write_bytes(lines.encode("utf-8"))
    if args.format == "json":
        _emit(_json_payload({"summary": table.to_json_dict(), "verdicts": verdict_rows}), args.output)
    else:
        _emit(table.to_text(), args.output)
    if args.fail_on_mismatch and any(
        v.category == BEHAVIOURAL_DIFFERENCE for v, _, _ in verdicts
    ):
        return 1
    return 0


def _load_trio(args: argparse.Namespace) -> tuple:
    corpora = []
    skipped: list[str] = []
    for path, role in (
        (args.mismatched, "mismatched"),
        (args.correct, "correct"),
        (args.testsuite, "test_suite"),
    ):
        corpus, notes = load_corpus_dir(path, role, lenient=args.lenient)
        corpora.append(corpus)
        skipped.extend(notes)
    for note in skipped:
        print(f"skipped: {note}", file=sys.stderr)
    return corpora[0], corpora[1], corpora[2], sorted(skipped)


def cmd_ops(args: argparse.Namespace) -> int:
    mismatched, correct, test_suite, skipped = _load_trio(args)
    report = op_set_report(mismatched, correct, test_suite)
    verdict = evaluate_h1(report, mismatched, overlap_fraction=args.h1_overlap)
    if args.format == "json":
        payload = {
            "sets": report.to_json_dict(),
            "counts": {name: len(ops) for name, ops in report.to_json_dict().items()},
            "h1": _hypothesis_json(verdict),
            "skipped_files": skipped,
        }
        _emit(_json_payload(payload), args.output)
    else:
        sets = report.to_json_dict()
        rows = [[name, str(len(ops)), ", ".join(ops)] for name, ops in sets.items()]
        text = render_columns(["set", "size", "operators"], rows)
        text += f"\nH1 {verdict.outcome}: {verdict.evidence}\n"
        if skipped:
            text += f"({len(skipped)} file(s) skipped)\n"
        _emit(text, args.output)
    return 0


def cmd_seqs(args: argparse.Namespace) -> int:
    mismatched, correct, test_suite, skipped = _load_trio(args)
    report = sequence_report(
        mismatched,
        correct,
        test_suite,
        min_len=args.min_seq_len,
        budget=PathBudget(args.max_paths),
        thresholds=H2Thresholds(args.h2_reject_min_support, args.h2_support_fraction),
    )
    if args.format == "json":
        payload = report.to_json_dict()
        payload["skipped_files"] = skipped
        _emit(_json_payload(payload), args.output)
    else:
        rows = [
            [name, str(len(report.regions[name])), str(len(report.reduced[name]))]
            for name in REGION_ORDER
        ]
        text = render_columns(["region", "unique", "reduced"], rows)
        histogram = report.h2.counts["support_histogram"]
        if histogram:
            text += "\nsupport histogram (models sharing a reduced sequence): "
            text += ", ".join(f"{k}:{v}" for k, v in histogram.items()) + "\n"
        excluded = {role: ids for role, ids in report.excluded.items() if ids}
        for role, ids in sorted(excluded.items()):
            text += f"excluded from {role} (path budget): {', '.join(ids)}\n"
        text += f"\nH2 {report.h2.outcome}: {report.h2.evidence}\n"
        if skipped:
            text += f"({len(skipped)} file(s) skipped)\n"
        _emit(text, args.output)
    return 0


def cmd_taxonomy(args: argparse.Namespace) -> int:
    records = parse_records(Path(args.records).read_bytes())
    if args.mode == "joint":
        tables = joint(records)
        if args.format == "json":
            _emit(_json_payload({"mode": "joint", "tables": [t.to_json_dict() for t in tables]}), args.output)
        else:
            _emit("\n".join(t.to_text() for t in tables), args.output)
    else:
        table = marginal(records, args.mode)
        if args.format == "json":
            _emit(_json_payload(table.to_json_dict()), args.output)
        else:
            _emit(table.to_text(), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convaudit",
        description="Differential auditing toolkit for model converters",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--output", metavar="PATH", help="write the payload to PATH instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify conversion records from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--threshold", type=float, default=1e-7)
    p.add_argument(
        "--nan-unequal",
        action="store_true",
        help="treat any NaN as incomparable instead of matching NaN positions",
    )
    p.add_argument("--verdicts", metavar="PATH", help="also write per-model verdicts as JSON Lines")
    p.add_argument("--fail-on-mismatch", action="store_true")
    p.set_defaults(func=cmd_classify)

    for name, func, extra in (
        ("ops", cmd_ops, "operator-set analysis over three corpus directories"),
        ("seqs", cmd_seqs, "operator-sequence analysis over three corpus directories"),
    ):
        p = sub.add_parser(name, help=extra)
        p.add_argument("--mismatched", required=True)
        p.add_argument("--correct", required=True)
        p.add_argument("--testsuite", required=True)
        p.add_argument("--lenient", action="store_true", help="skip unreadable model files")
        if name == "ops":
            p.add_argument("--h1-overlap", type=float, default=0.9)
        else:
            p.add_argument("--min-seq-len", type=int, default=DEFAULT_MIN_SEQ_LEN)
            p.add_argument("--max-paths", type=int, default=10_000)
            p.add_argument("--h2-reject-min-support", type=int, default=2)
            p.add_argument("--h2-support-fraction", type=float, default=0.5)
        p.set_defaults(func=func)

    p = sub.add_parser("taxonomy", help="failure-taxonomy tables from a record CSV")
    p.add_argument("--records", required=True)
    p.add_argument("--mode", choices=MODES, required=True)
    p.set_defaults(func=cmd_taxonomy)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
