#!/usr/bin/env python3
"""Ask whether operator *kinds* separate misbehaving models from clean ones.

Two miniature corpora tell opposite stories.  In the first, mismatched
and correct models use nearly the same vocabulary, so operator kinds
explain nothing.  In the second, one operator appears only in mismatched
models and in all of them.
"""

from convaudit.graph import GraphNode, ModelGraph, make_corpus
from convaudit.opsets import evaluate_h1, op_set_report


def chain(model_id: str, ops: list[str]) -> ModelGraph:
    nodes = []
    prev = "x"
    for i, op in enumerate(ops, start=1):
        nodes.append(GraphNode(f"n{i}", op, (prev,), (f"v{i}",)))
        prev = f"v{i}"
    return ModelGraph(model_id, tuple(nodes), ("x",), (prev,))


def show(title: str, mismatched, correct, test_suite) -> None:
    report = op_set_report(mismatched, correct, test_suite)
    verdict = evaluate_h1(report, mismatched)
    print(f"--- {title} ---")
    print(f"mismatched ops:  {sorted(report.mismatched_ops)}")
    print(f"correct ops:     {sorted(report.correct_ops)}")
    print(f"only mismatched: {sorted(report.mismatched_minus_correct)}")
    print(f"overlap: {verdict.counts['overlap']:.2f} -> {verdict.outcome}")
    print(f"  {verdict.evidence}\n")


def main() -> None:
    # Story 1: heavy overlap.  Nine of ten operators are shared, so the
    # operator-kind hypothesis dies on the overlap check.
    shared = ["Conv", "Relu", "MaxPool", "Concat", "Softmax", "Add", "Mul", "Gemm", "Pad"]
    show(
        "shared vocabulary",
        make_corpus("mismatched", [chain("m1", shared + ["Sqrt"])]),
        make_corpus("correct", [chain("c1", shared)]),
        make_corpus("test_suite", [chain("t1", ["Conv", "Relu"])]),
    )

    # Story 2: a clean split.  Einsum shows up in every mismatched model
    # and in no correct one; the hypothesis survives.
    show(
        "exclusive operator",
        make_corpus(
            "mismatched",
            [chain("m1", ["Einsum", "Relu"]), chain("m2", ["Relu", "Einsum", "Add"])],
        ),
        make_corpus(
            "correct",
            [chain("c1", ["Relu", "Add"]), chain("c2", ["Add", "Mul"])],
        ),
        make_corpus("test_suite", [chain("t1", ["Relu", "Mul"])]),
    )


if __name__ == "__main__":
    main()
