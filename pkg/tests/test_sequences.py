import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convaudit.corpora import load_corpus_dir
from convaudit.errors import InsufficientModels, MalformedInput, PathExplosion
from convaudit.graph import GraphNode, ModelGraph, make_corpus
from convaudit.sequences import (
    H2Thresholds,
    PathBudget,
    SeqSet,
    common_sequences,
    corpus_paths,
    evaluate_h2,
    reduce_sequences,
    seq_difference,
    sequence_report,
    shared_between,
    shared_within,
    simple_paths,
    support,
)
from helpers import (
    all_substrings,
    brute_force_common,
    brute_force_paths,
    brute_force_reduce,
    random_dag,
)

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def chain_model(model_id: str, ops: list[str]) -> ModelGraph:
    nodes = []
    prev = "x"
    for i, op in enumerate(ops, start=1):
        nodes.append(GraphNode(f"n{i:02d}", op, (prev,), (f"v{i}",)))
        prev = f"v{i}"
    return ModelGraph(model_id, tuple(nodes), ("x",), (prev,))


def diamond(model_id: str, top: str, left: str, right: str, bottom: str) -> ModelGraph:
    nodes = (
        GraphNode("n1", top, ("x",), ("v1",)),
        GraphNode("n2", left, ("v1",), ("v2",)),
        GraphNode("n3", right, ("v1",), ("v3",)),
        GraphNode("n4", bottom, ("v2", "v3"), ("v4",)),
    )
    return ModelGraph(model_id, nodes, ("x",), ("v4",))


def diamond_ladder(model_id: str, k: int) -> ModelGraph:
    """k diamonds in a row: 2**k simple paths."""
    nodes = []
    prev = "x"
    for i in range(k):
        a, b, join = f"a{i}", f"b{i}", f"j{i}"
        nodes.append(GraphNode(f"n{i:03d}l", "Relu", (prev,), (a,)))
        nodes.append(GraphNode(f"n{i:03d}r", "Add", (prev,), (b,)))
        nodes.append(GraphNode(f"n{i:03d}m", "Concat", (a, b), (join,)))
        prev = join
    return ModelGraph(model_id, tuple(nodes), ("x",), (prev,))


def seq_trio():
    base = FIXTURES / "seq_trio"
    m, _ = load_corpus_dir(base / "mismatched", "mismatched")
    c, _ = load_corpus_dir(base / "correct", "correct")
    t, _ = load_corpus_dir(base / "testsuite", "test_suite")
    return m, c, t


# ---------------------------------------------------------------- simple_paths


def test_paths_chain():
    g = chain_model("m", ["Conv", "Relu", "Add"])
    assert simple_paths(g) == [("Conv", "Relu", "Add")]


def test_paths_diamond():
    g = diamond("m", "Conv", "Relu", "Add", "Concat")
    assert sorted(simple_paths(g)) == [
        ("Conv", "Add", "Concat"),
        ("Conv", "Relu", "Concat"),
    ]


def test_paths_preserve_duplicates():
    # Both branches spell the same ops: the multiset keeps both entries.
    g = diamond("m", "Conv", "Relu", "Relu", "Concat")
    assert simple_paths(g) == [("Conv", "Relu", "Concat"), ("Conv", "Relu", "Concat")]


def test_paths_isolated_nodes():
    nodes = (
        GraphNode("a", "Relu", ("x",), ("v1",)),
        GraphNode("b", "Add", ("y",), ("v2",)),
    )
    g = ModelGraph("m", nodes, ("x", "y"), ("v1", "v2"))
    assert simple_paths(g) == [("Relu",), ("Add",)]


def test_paths_empty_graph():
    g = ModelGraph("m", (), ("x",), ("x",))
    assert simple_paths(g) == []


def test_paths_parallel_edges_collapse():
    # One node consuming the same value twice is a single edge.
    nodes = (
        GraphNode("a", "Relu", ("x",), ("v1",)),
        GraphNode("b", "Concat", ("v1", "v1"), ("v2",)),
    )
    g = ModelGraph("m", nodes, ("x",), ("v2",))
    assert simple_paths(g) == [("Relu", "Concat")]


def test_paths_deterministic_order():
    g = diamond("m", "Conv", "Relu", "Add", "Concat")
    # n2 (Relu) sorts before n3 (Add), so the Relu path comes out first.
    assert simple_paths(g) == [("Conv", "Relu", "Concat"), ("Conv", "Add", "Concat")]


def test_paths_budget_exceeded():
    g = diamond_ladder("wide", 5)  # 32 paths
    with pytest.raises(PathExplosion):
        simple_paths(g, PathBudget(max_paths_per_model=31))
    assert len(simple_paths(g, PathBudget(max_paths_per_model=32))) == 32


def test_paths_default_budget_allows_10k():
    # 2**13 = 8192 paths fits; 2**14 = 16384 does not.
    assert len(simple_paths(diamond_ladder("w13", 13))) == 8192
    with pytest.raises(PathExplosion) as err:
        simple_paths(diamond_ladder("w14", 14))
    assert "w14" in str(err.value)


def test_budget_must_be_positive():
    with pytest.raises(MalformedInput):
        PathBudget(0)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_paths_match_bruteforce(seed):
    g = random_dag(random.Random(seed))
    assert sorted(simple_paths(g)) == sorted(brute_force_paths(g))


def test_corpus_paths_excludes_over_budget():
    corpus = make_corpus(
        "mismatched",
        [chain_model("ok", ["Conv", "Relu"]), diamond_ladder("boom", 4)],
    )
    paths, excluded = corpus_paths(corpus, PathBudget(max_paths_per_model=8))
    assert excluded == ["boom"]
    assert set(paths) == {"ok"}


# ------------------------------------------------------------ common_sequences


def test_common_prefix_runs():
    got = common_sequences([("A", "B", "C", "D", "E")], [("A", "B", "C", "D", "F")])
    assert got.sequences == {
        ("A", "B", "C"),
        ("B", "C", "D"),
        ("A", "B", "C", "D"),
    }


def test_common_min_len_filters():
    long = common_sequences([("A", "B", "C")], [("A", "B", "C")], min_len=4)
    assert long.sequences == frozenset()
    loose = common_sequences([("A", "B")], [("A", "B")], min_len=2)
    assert loose.sequences == {("A", "B")}


def test_common_counts_runs_once():
    # The run repeats inside one path and across paths: still one entry.
    got = common_sequences(
        [("A", "B", "C", "A", "B", "C"), ("A", "B", "C")],
        [("A", "B", "C")],
    )
    assert got.sequences == {("A", "B", "C")}


def test_common_no_overlap():
    got = common_sequences([("A", "B", "C")], [("D", "E", "F")])
    assert got.sequences == frozenset()


def test_common_min_len_validated():
    with pytest.raises(MalformedInput):
        common_sequences([("A",)], [("A",)], min_len=0)


op_strings = st.lists(
    st.lists(st.sampled_from("abcd"), min_size=1, max_size=9).map(tuple),
    min_size=1,
    max_size=4,
)


@settings(max_examples=80, deadline=None)
@given(op_strings, op_strings, st.integers(min_value=1, max_value=4))
def test_common_matches_bruteforce(paths_x, paths_y, min_len):
    got = common_sequences(paths_x, paths_y, min_len)
    assert got.sequences == brute_force_common(paths_x, paths_y, min_len)


@settings(max_examples=40, deadline=None)
@given(op_strings, op_strings)
def test_common_symmetric(paths_x, paths_y):
    assert (
        common_sequences(paths_x, paths_y).sequences
        == common_sequences(paths_y, paths_x).sequences
    )


# --------------------------------------------------- shared_within / between


def test_shared_within_requires_two_models():
    corpus = make_corpus("mismatched", [chain_model("only", ["A", "B", "C"])])
    with pytest.raises(InsufficientModels):
        shared_within(corpus)


def test_shared_between_requires_nonempty():
    left = make_corpus("mismatched", [chain_model("m", ["A", "B", "C"])])
    with pytest.raises(InsufficientModels):
        shared_between(left, make_corpus("correct", []))


def test_shared_within_trio():
    m, _, _ = seq_trio()
    got = shared_within(m)
    expected = json.loads((FIXTURES / "seq_trio" / "oracle_expected.json").read_text())
    assert sorted(got.sequences) == [
        tuple(s) for s in expected["regions"]["shared_within_mismatched"]
    ]


def test_shared_between_trio():
    m, c, _ = seq_trio()
    got = shared_between(m, c)
    expected = json.loads((FIXTURES / "seq_trio" / "oracle_expected.json").read_text())
    assert sorted(got.sequences) == [
        tuple(s) for s in expected["regions"]["shared_with_correct"]
    ]


def test_seq_difference():
    left = SeqSet(frozenset({("A",), ("B",), ("C",)}), "left")
    right = SeqSet(frozenset({("B",)}), "right")
    diff = seq_difference(left, right)
    assert diff.sequences == {("A",), ("C",)}
    assert diff.provenance == "left_minus_right"


# ------------------------------------------------------------ reduce_sequences


def test_reduce_shortens_to_common_core():
    seqs = SeqSet(
        frozenset(
            {
                ("a", "a", "a", "a", "b", "d"),
                ("a", "a", "a", "a", "b", "c"),
            }
        ),
        "test",
    )
    reduced = reduce_sequences(seqs)
    assert reduced.sequences == {("a", "a", "a", "a", "b")}


def test_reduce_keeps_ties():
    # Two maximal common runs of equal length: both survive.
    seqs = SeqSet(
        frozenset(
            {
                ("x", "a", "b", "c", "p", "d", "e", "f"),
                ("y", "a", "b", "c", "q", "d", "e", "f"),
            }
        ),
        "test",
    )
    reduced = reduce_sequences(seqs)
    assert reduced.sequences == {("a", "b", "c"), ("d", "e", "f")}


def test_reduce_empty():
    assert reduce_sequences(SeqSet(frozenset(), "test")).sequences == frozenset()


def test_reduce_antichain_unchanged():
    seqs = frozenset({("a", "b", "c"), ("d", "e", "f")})
    assert reduce_sequences(SeqSet(seqs, "test")).sequences == seqs


def test_reduce_drops_containing_elements():
    seqs = SeqSet(frozenset({("a", "b", "c"), ("a", "b", "c", "d")}), "test")
    assert reduce_sequences(seqs).sequences == {("a", "b", "c")}


seq_sets = st.sets(
    st.lists(st.sampled_from("abc"), min_size=3, max_size=8).map(tuple),
    min_size=1,
    max_size=6,
)


@settings(max_examples=60, deadline=None)
@given(seq_sets)
def test_reduce_matches_bruteforce(seqs):
    got = reduce_sequences(SeqSet(frozenset(seqs), "t")).sequences
    assert got == brute_force_reduce(seqs, 3)


@settings(max_examples=60, deadline=None)
@given(seq_sets)
def test_reduce_invariants(seqs):
    reduced = reduce_sequences(SeqSet(frozenset(seqs), "t")).sequences
    # Antichain: no element is a proper run of another.
    for s in reduced:
        for t in reduced:
            if s != t:
                assert not (len(s) < len(t) and s in all_substrings(t, 1))
    # Coverage: every input sequence contains some reduced element.
    for original in seqs:
        assert any(r in all_substrings(original, 1) for r in reduced)
    # Idempotence: reducing again changes nothing.
    assert reduce_sequences(SeqSet(frozenset(reduced), "t")).sequences == reduced


# --------------------------------------------------------------------- support


def test_support_counts_models_not_paths():
    m, _, _ = seq_trio()
    assert support(("Relu", "MaxPool", "Concat"), m) == 3
    assert support(("Conv", "Relu", "MaxPool", "Concat"), m) == 2
    assert support(("Gemm",), m) == 1
    assert support(("Pad",), m) == 0


def test_support_duplicate_paths_count_once():
    g = diamond("m", "Conv", "Relu", "Relu", "Concat")
    corpus = make_corpus("mismatched", [g])
    assert support(("Conv", "Relu", "Concat"), corpus) == 1


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.lists(st.sampled_from(("Conv", "Relu", "Add")), min_size=1, max_size=3).map(tuple),
    st.sampled_from(("Conv", "Relu", "Add")),
)
def test_support_extension_never_gains(seed, seq, extra):
    rng = random.Random(seed)
    corpus = make_corpus(
        "mismatched", [random_dag(rng, model_id=f"m{i}") for i in range(3)]
    )
    assert support(seq + (extra,), corpus) <= support(seq, corpus)


# ----------------------------------------------------------------- evaluate_h2


def h2_corpus():
    corpus, _ = load_corpus_dir(FIXTURES / "h2_corpus" / "mismatched", "mismatched")
    return corpus


def test_h2_rejected_on_support_one():
    corpus = h2_corpus()
    seqs = SeqSet(frozenset({("Relu", "Add", "Mul")}), "unique_to_mismatched")
    verdict = evaluate_h2(seqs, corpus)
    assert verdict.hypothesis == "H2"
    assert verdict.outcome == "rejected"
    assert verdict.counts["max_support"] == 1


def test_h2_supported_on_full_support():
    corpus = h2_corpus()
    seqs = SeqSet(frozenset({("Conv", "Relu", "MaxPool")}), "unique_to_mismatched")
    verdict = evaluate_h2(seqs, corpus)
    assert verdict.outcome == "supported"
    assert verdict.counts["max_support"] == 3
    assert verdict.counts["support_histogram"] == {"3": 1}


def test_h2_empty_set_rejected():
    verdict = evaluate_h2(SeqSet(frozenset(), "empty"), h2_corpus())
    assert verdict.outcome == "rejected"
    assert verdict.counts["max_support"] == 0


def test_h2_inconclusive_between_thresholds():
    corpus = make_corpus(
        "mismatched",
        [
            chain_model("m1", ["A", "B", "C"]),
            chain_model("m2", ["A", "B", "C"]),
            chain_model("m3", ["D", "E", "F"]),
            chain_model("m4", ["D", "E", "G"]),
            chain_model("m5", ["H", "I", "J"]),
        ],
    )
    seqs = SeqSet(frozenset({("A", "B", "C")}), "unique_to_mismatched")
    verdict = evaluate_h2(seqs, corpus)  # support 2 of 5
    assert verdict.outcome == "inconclusive"


def test_h2_thresholds_validated():
    with pytest.raises(MalformedInput):
        H2Thresholds(reject_min_support=0)
    with pytest.raises(MalformedInput):
        H2Thresholds(support_fraction=0.0)
    with pytest.raises(MalformedInput):
        H2Thresholds(support_fraction=1.5)


def test_h2_custom_thresholds_shift_outcome():
    corpus = h2_corpus()
    seqs = SeqSet(frozenset({("Conv", "Relu", "MaxPool")}), "u")
    strict = evaluate_h2(seqs, corpus, H2Thresholds(reject_min_support=4))
    assert strict.outcome == "rejected"


# ------------------------------------------------------------ sequence_report


def test_report_matches_frozen_oracle():
    m, c, t = seq_trio()
    report = sequence_report(m, c, t)
    expected = json.loads((FIXTURES / "seq_trio" / "oracle_expected.json").read_text())
    for name, seqs in report.regions.items():
        assert sorted(seqs.sequences) == [
            tuple(s) for s in expected["regions"][name]
        ], name
    for name, seqs in report.reduced.items():
        assert sorted(seqs.sequences) == [
            tuple(s) for s in expected["reduced"][name]
        ], name
    assert report.h2.outcome == "supported"
    assert report.h2.counts["max_support"] == expected["max_support"]
    assert report.excluded == {"mismatched": [], "correct": [], "test_suite": []}


def test_report_json_shape():
    m, c, t = seq_trio()
    doc = sequence_report(m, c, t).to_json_dict()
    assert doc["regions"]["shared_within_mismatched"] == {"unique": 5, "reduced": 3}
    assert doc["regions"]["shared_with_correct"] == {"unique": 2, "reduced": 2}
    assert doc["regions"]["shared_with_testsuite"] == {"unique": 3, "reduced": 2}
    assert doc["regions"]["unique_to_mismatched"] == {"unique": 3, "reduced": 1}
    assert doc["unique_to_mismatched_reduced"] == [["Relu", "MaxPool", "Concat"]]
    assert doc["h2"]["outcome"] == "supported"


def test_report_lists_excluded_models():
    m = make_corpus(
        "mismatched",
        [
            chain_model("m1", ["A", "B", "C", "D"]),
            chain_model("m2", ["A", "B", "C", "E"]),
            diamond_ladder("boom", 6),
        ],
    )
    c = make_corpus("correct", [chain_model("c1", ["Z", "Z", "Z"])])
    t = make_corpus("test_suite", [chain_model("t1", ["A", "B", "C"])])
    report = sequence_report(m, c, t, budget=PathBudget(max_paths_per_model=16))
    assert report.excluded["mismatched"] == ["boom"]
    # The excluded model still counts toward the corpus size for H2.
    assert report.h2.counts["mismatched_models"] == 3
    assert report.h2.counts["excluded_models"] == 1
    assert sorted(report.regions["unique_to_mismatched"].sequences) == [
        ("A", "B", "C")
    ]


def test_report_min_len_two():
    m, c, t = seq_trio()
    wide = sequence_report(m, c, t, min_len=2)
    narrow = sequence_report(m, c, t, min_len=3)
    assert wide.regions["shared_within_mismatched"].sequences > (
        narrow.regions["shared_within_mismatched"].sequences
    )
