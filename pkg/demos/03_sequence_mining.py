#!/usr/bin/env python3
"""Mine operator sequences that only misbehaving models share.

The pipeline in five steps: enumerate simple paths, extract common runs
per model pair, partition them into regions, shrink each region to its
shortest cores, and count how many mismatched models support each core.
"""

from convaudit.graph import GraphNode, ModelGraph, make_corpus
from convaudit.sequences import sequence_report, simple_paths


def chain(model_id: str, ops: list[str]) -> ModelGraph:
    nodes = []
    prev = "x"
    for i, op in enumerate(ops, start=1):
        nodes.append(GraphNode(f"n{i}", op, (prev,), (f"v{i}",)))
        prev = f"v{i}"
    return ModelGraph(model_id, tuple(nodes), ("x",), (prev,))


def branching(model_id: str) -> ModelGraph:
    # A trunk that fans out: two simple paths through one model.
    nodes = (
        GraphNode("n1", "Conv", ("x",), ("v1",)),
        GraphNode("n2", "Relu", ("v1",), ("v2",)),
        GraphNode("n3", "MaxPool", ("v2",), ("v3",)),
        GraphNode("n4", "Sigmoid", ("v3",), ("v4",)),
        GraphNode("n5", "Add", ("v3",), ("v5",)),
    )
    return ModelGraph(model_id, nodes, ("x",), ("v4", "v5"))


def main() -> None:
    mismatched = make_corpus(
        "mismatched",
        [
            chain("m1", ["Conv", "Relu", "MaxPool", "Softmax"]),
            branching("m2"),
            chain("m3", ["Relu", "MaxPool", "Softmax", "Gemm"]),
        ],
    )
    correct = make_corpus(
        "correct",
        [
            chain("c1", ["MaxPool", "Softmax", "Gemm"]),
            chain("c2", ["Add", "Conv", "Relu"]),
        ],
    )
    test_suite = make_corpus("test_suite", [chain("t1", ["Conv", "Relu", "MaxPool"])])

    print("simple paths per mismatched model:")
    for model in mismatched.models:
        for path in simple_paths(model):
            print(f"  {model.model_id}: {' -> '.join(path)}")

    report = sequence_report(mismatched, correct, test_suite)
    print("\nregions (unique / reduced):")
    for name, seqs in report.regions.items():
        print(f"  {name}: {len(seqs)} / {len(report.reduced[name])}")

    print("\nshortest cores unique to mismatched models:")
    for seq in report.reduced["unique_to_mismatched"].sorted():
        print(f"  {' -> '.join(seq)}")

    print(f"\nH2 {report.h2.outcome}: {report.h2.evidence}")


if __name__ == "__main__":
    main()
