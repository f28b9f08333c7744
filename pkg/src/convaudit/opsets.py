"""Operator-set analysis.

Tests whether particular operator *kinds* explain misbehaving conversions:
collect the operator sets of a mismatched corpus, a correct corpus and a
converter test-suite corpus, compare them, and decide the operator-type
hypothesis from the overlap.

Decision rule: heavy overlap between the mismatched and correct sets means
operator kinds cannot separate the two corpora, so the hypothesis is
rejected; it is supported only when some operators appear exclusively in
mismatched models and every mismatched model contains at least one of
them; anything in between is inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedInput
from .graph import Corpus, operator_set


@dataclass(frozen=True)
class HypothesisVerdict:
    hypothesis: str  # "H1" (operator types) or "H2" (operator sequences)
    outcome: str  # "supported" | "rejected" | "inconclusive"
    evidence: str
    counts: dict


@dataclass(frozen=True)
class OpSetReport:
    mismatched_ops: frozenset[str]
    correct_ops: frozenset[str]
    test_suite_ops: frozenset[str]
    mismatched_minus_correct: frozenset[str]
    correct_minus_mismatched: frozenset[str]
    mismatched_minus_tests: frozenset[str]
    tests_minus_mismatched: frozenset[str]

    def to_json_dict(self) -> dict:
        return {
            "mismatched_ops": sorted(self.mismatched_ops),
            "correct_ops": sorted(self.correct_ops),
            "test_suite_ops": sorted(self.test_suite_ops),
            "mismatched_minus_correct": sorted(self.mismatched_minus_correct),
            "correct_minus_mismatched": sorted(self.correct_minus_mismatched),
            "mismatched_minus_tests": sorted(self.mismatched_minus_tests),
            "tests_minus_mismatched": sorted(self.tests_minus_mismatched),
        }


def collect_ops(corpus: Corpus) -> frozenset[str]:
    ops: set[str] = set()
    for model in corpus.models:
        ops |= operator_set(model)
    return frozenset(ops)


def op_set_report(mismatched: Corpus, correct: Corpus, test_suite: Corpus) -> OpSetReport:
    a = collect_ops(mismatched)
    b = collect_ops(correct)
    c = collect_ops(test_suite)
    return OpSetReport(
        mismatched_ops=a,
        correct_ops=b,
        test_suite_ops=c,
        mismatched_minus_correct=frozenset(a - b),
        correct_minus_mismatched=frozenset(b - a),
        mismatched_minus_tests=frozenset(a - c),
        tests_minus_mismatched=frozenset(c - a),
    )


def evaluate_h1(
    report: OpSetReport, mismatched: Corpus, overlap_fraction: float = 0.9
) -> HypothesisVerdict:
    """Decide the operator-type hypothesis from an OpSetReport.

    The overlap measure is Jaccard similarity of the mismatched and
    correct operator sets (two empty sets count as full overlap).  The
    mismatched corpus is needed for the supported branch: exclusive
    operators must touch every mismatched model, not just some.
    """
    if not 0 < overlap_fraction <= 1:
        raise MalformedInput(f"overlap fraction must be in (0, 1], got {overlap_fraction}")
    a = report.mismatched_ops
    b = report.correct_ops
    union = a | b
    shared = a & b
    overlap = 1.0 if not union else len(shared) / len(union)
    exclusive = sorted(report.mismatched_minus_correct)
    counts = {
        "mismatched_ops": len(a),
        "correct_ops": len(b),
        "shared_ops": len(shared),
        "union_ops": len(union),
        "overlap": round(overlap, 6),
        "exclusive_ops": len(exclusive),
    }
    if overlap >= overlap_fraction:
        return HypothesisVerdict(
            "H1",
            "rejected",
            f"operator sets overlap at {overlap:.3f} (threshold {overlap_fraction}); "
            "operator kinds do not separate mismatched from correct models",
            counts,
        )
    if exclusive and mismatched.models:
        uncovered = [
            m.model_id
            for m in mismatched.models
            if not operator_set(m) & report.mismatched_minus_correct
        ]
        if not uncovered:
            return HypothesisVerdict(
                "H1",
                "supported",
                "every mismatched model contains an operator unique to the mismatched "
                f"corpus: {', '.join(exclusive)}",
                counts,
            )
        counts = dict(counts, uncovered_models=len(uncovered))
        return HypothesisVerdict(
            "H1",
            "inconclusive",
            f"{len(uncovered)} mismatched model(s) contain none of the exclusive "
            f"operators ({', '.join(exclusive)})",
            counts,
        )
    return HypothesisVerdict(
        "H1",
        "inconclusive",
        "no operator is exclusive to the mismatched corpus yet overlap is below "
        "the rejection threshold",
        counts,
    )
