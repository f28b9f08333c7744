"""Operator-sequence analysis.

Tests whether particular operator *sequences* explain misbehaving
conversions.  A model's behaviour along one dataflow route is summarized
as the ordered operator kinds on a simple path from a source node to a
sink node; a sequence shared by two models is a contiguous run of at
least ``min_len`` operators appearing as a substring of a path in each.

Regions of interest, given mismatched, correct and test-suite corpora:

    shared_within_mismatched     runs shared by two distinct mismatched models
    shared_with_correct          runs shared across the mismatched/correct divide
    shared_with_testsuite        runs shared across the mismatched/test-suite divide
    unique_to_mismatched         shared_within_mismatched minus shared_with_correct

Mined sets are then reduced to their shortest common cores: the set is
closed under pairwise longest-common-substring extraction, then filtered
to elements that contain no other element.  The result is an antichain,
covers every input sequence, and is a fixed point of the reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import InsufficientModels, MalformedInput, PathExplosion
from .graph import Corpus, ModelGraph, node_successors
from .opsets import HypothesisVerdict

OpSequence = tuple[str, ...]

DEFAULT_MIN_SEQ_LEN = 3


@dataclass(frozen=True)
class PathBudget:
    max_paths_per_model: int = 10_000

    def __post_init__(self) -> None:
        if self.max_paths_per_model <= 0:
            raise MalformedInput("path budget must be positive")


@dataclass(frozen=True)
class H2Thresholds:
    reject_min_support: int = 2
    support_fraction: float = 0.5

    def __post_init__(self) -> None:
        if self.reject_min_support < 1:
            raise MalformedInput("reject_min_support must be at least 1")
        if not 0 < self.support_fraction <= 1:
            raise MalformedInput(
                f"support fraction must be in (0, 1], got {self.support_fraction}"
            )


@dataclass(frozen=True)
class SeqSet:
    sequences: frozenset[OpSequence]
    provenance: str

    def sorted(self) -> list[OpSequence]:
        return sorted(self.sequences)

    def __len__(self) -> int:
        return len(self.sequences)


def simple_paths(graph: ModelGraph, budget: PathBudget = PathBudget()) -> list[OpSequence]:
    """Every maximal node path, rendered as its ordered operator kinds.

    Paths run from source nodes (no node predecessors) to sink nodes (no
    node successors); enumeration is depth-first with node ids expanded in
    sorted order, so the output order is deterministic.  Distinct node
    paths with equal operator spellings stay distinct entries.  Exceeding
    the budget raises PathExplosion rather than truncating.
    """
    succ = node_successors(graph)
    has_pred: set[str] = set()
    for outs in succ.values():
        has_pred.update(outs)
    sources = sorted(nid for nid in succ if nid not in has_pred)
    op_of = {n.id: n.op_type for n in graph.nodes}

    paths: list[OpSequence] = []
    for source in sources:
        # Iterative DFS; recursion depth would equal path length.  A DAG
        # needs no visited set: no path can revisit a node.
        path = [source]
        stack = [iter(succ[source])]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                if not succ[path[-1]]:  # sink reached: the path is maximal
                    paths.append(tuple(op_of[nid] for nid in path))
                    if len(paths) > budget.max_paths_per_model:
                        raise PathExplosion(graph.model_id, budget.max_paths_per_model)
                stack.pop()
                path.pop()
            else:
                path.append(nxt)
                stack.append(iter(succ[nxt]))
    return paths


def corpus_paths(
    corpus: Corpus, budget: PathBudget = PathBudget()
) -> tuple[dict[str, list[OpSequence]], list[str]]:
    """Paths per model id; models over budget are excluded and listed."""
    by_model: dict[str, list[OpSequence]] = {}
    excluded: list[str] = []
    for model in corpus.models:
        try:
            by_model[model.model_id] = simple_paths(model, budget)
        except PathExplosion:
            excluded.append(model.model_id)
    return by_model, sorted(excluded)


def common_sequences(
    paths_x: Sequence[OpSequence],
    paths_y: Sequence[OpSequence],
    min_len: int = DEFAULT_MIN_SEQ_LEN,
) -> SeqSet:
    """All runs of >= min_len operators appearing in both path lists.

    A run counts once regardless of how many paths or positions contain
    it.  Symmetric in its arguments.
    """
    _check_min_len(min_len)
    found: set[OpSequence] = set()
    for p in sorted(set(paths_x)):
        for q in sorted(set(paths_y)):
            _pair_runs(p, q, min_len, found)
    return SeqSet(frozenset(found), "pairwise")


def _pair_runs(p: OpSequence, q: OpSequence, min_len: int, out: set[OpSequence]) -> None:
    """Add every common contiguous run of p and q with length >= min_len.

    Suffix-match table: prev[j] is the length of the longest common suffix
    of p[:i] and q[:j]; each match position contributes the runs of every
    admissible length ending there.
    """
    prev = [0] * (len(q) + 1)
    for i in range(1, len(p) + 1):
        cur = [0] * (len(q) + 1)
        sym = p[i - 1]
        for j in range(1, len(q) + 1):
            if sym == q[j - 1]:
                k = prev[j - 1] + 1
                cur[j] = k
                for length in range(min_len, k + 1):
                    out.add(p[i - length : i])
        prev = cur


def _longest_common_runs(a: OpSequence, b: OpSequence, min_len: int) -> set[OpSequence]:
    """All longest common contiguous runs of a and b, if >= min_len long."""
    best = 0
    found: set[OpSequence] = set()
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        sym = a[i - 1]
        for j in range(1, len(b) + 1):
            if sym == b[j - 1]:
                k = prev[j - 1] + 1
                cur[j] = k
                if k > best:
                    best = k
                    found = {a[i - k : i]}
                elif k == best:
                    found.add(a[i - k : i])
        prev = cur
    if best < min_len:
        return set()
    return found


def _contains(path: OpSequence, seq: OpSequence) -> bool:
    n = len(seq)
    if n == 0 or n > len(path):
        return False
    return any(path[i : i + n] == seq for i in range(len(path) - n + 1))


def _is_proper_subrun(small: OpSequence, big: OpSequence) -> bool:
    return len(small) < len(big) and _contains(big, small)


def shared_within(
    corpus: Corpus,
    min_len: int = DEFAULT_MIN_SEQ_LEN,
    budget: PathBudget = PathBudget(),
) -> SeqSet:
    """Runs shared by at least two distinct models of one corpus."""
    paths, _ = corpus_paths(corpus, budget)
    return _shared_within_paths(paths, corpus.role, min_len)


def shared_between(
    corpus_x: Corpus,
    corpus_y: Corpus,
    min_len: int = DEFAULT_MIN_SEQ_LEN,
    budget: PathBudget = PathBudget(),
) -> SeqSet:
    """Runs shared by some model of corpus_x and some model of corpus_y."""
    paths_x, _ = corpus_paths(corpus_x, budget)
    paths_y, _ = corpus_paths(corpus_y, budget)
    return _shared_between_paths(paths_x, paths_y, corpus_x.role, corpus_y.role, min_len)


def _shared_within_paths(
    paths: Mapping[str, list[OpSequence]], role: str, min_len: int
) -> SeqSet:
    if len(paths) < 2:
        raise InsufficientModels(role, len(paths), 2)
    found: set[OpSequence] = set()
    for id_x, id_y in combinations(sorted(paths), 2):
        found |= common_sequences(paths[id_x], paths[id_y], min_len).sequences
    return SeqSet(frozenset(found), f"shared_within_{role}")


def _shared_between_paths(
    paths_x: Mapping[str, list[OpSequence]],
    paths_y: Mapping[str, list[OpSequence]],
    role_x: str,
    role_y: str,
    min_len: int,
) -> SeqSet:
    if not paths_x:
        raise InsufficientModels(role_x, 0, 1)
    if not paths_y:
        raise InsufficientModels(role_y, 0, 1)
    found: set[OpSequence] = set()
    for id_x in sorted(paths_x):
        for id_y in sorted(paths_y):
            found |= common_sequences(paths_x[id_x], paths_y[id_y], min_len).sequences
    return SeqSet(frozenset(found), f"shared_between_{role_x}_{role_y}")


def seq_difference(left: SeqSet, right: SeqSet, provenance: str | None = None) -> SeqSet:
    return SeqSet(
        left.sequences - right.sequences,
        provenance or f"{left.provenance}_minus_{right.provenance}",
    )


def reduce_sequences(seqs: SeqSet, min_len: int = DEFAULT_MIN_SEQ_LEN) -> SeqSet:
    """Shortest common cores of a sequence set.

    Close the set under pairwise longest-common-run extraction (runs
    shorter than min_len are not extracted), then keep only elements that
    contain no other element.  Reducing a reduced set returns it
    unchanged.
    """
    _check_min_len(min_len)
    work: set[OpSequence] = set(seqs.sequences)
    fresh: set[OpSequence] = set(work)
    while fresh:
        snapshot = sorted(work)
        additions: set[OpSequence] = set()
        for a, b in combinations(snapshot, 2):
            if a not in fresh and b not in fresh:
                continue  # both old: pair already processed in a prior sweep
            for core in _longest_common_runs(a, b, min_len):
                if core not in work:
                    additions.add(core)
        work |= additions
        fresh = additions
    minimal = {s for s in work if not any(_is_proper_subrun(o, s) for o in work)}
    return SeqSet(frozenset(minimal), f"reduced({seqs.provenance})")


def support(
    seq: OpSequence, corpus: Corpus, budget: PathBudget = PathBudget()
) -> int:
    """Number of corpus models with seq as a run of at least one path."""
    paths, _ = corpus_paths(corpus, budget)
    return _support_in_paths(seq, paths)


def _support_in_paths(seq: OpSequence, paths: Mapping[str, list[OpSequence]]) -> int:
    return sum(1 for model_paths in paths.values() if any(_contains(p, seq) for p in model_paths))


def evaluate_h2(
    unique_to_mismatched: SeqSet,
    mismatched: Corpus,
    thresholds: H2Thresholds = H2Thresholds(),
    budget: PathBudget = PathBudget(),
) -> HypothesisVerdict:
    """Decide the operator-sequence hypothesis.

    Takes the reduced unique_to_mismatched set; m is the largest number of
    mismatched models containing any single sequence and n the corpus
    size.  m below reject_min_support rejects; m/n at or above
    support_fraction supports; otherwise inconclusive.
    """
    paths, excluded = corpus_paths(mismatched, budget)
    supports = {seq: _support_in_paths(seq, paths) for seq in unique_to_mismatched.sequences}
    return _decide_h2(supports, len(mismatched.models), len(excluded), thresholds)


def _decide_h2(
    supports: Mapping[OpSequence, int],
    model_count: int,
    excluded_count: int,
    thresholds: H2Thresholds,
) -> HypothesisVerdict:
    m = max(supports.values(), default=0)
    histogram: dict[int, int] = {}
    for value in supports.values():
        histogram[value] = histogram.get(value, 0) + 1
    counts = {
        "sequences": len(supports),
        "max_support": m,
        "mismatched_models": model_count,
        "excluded_models": excluded_count,
        "support_histogram": {str(k): v for k, v in sorted(histogram.items())},
    }
    if m < thresholds.reject_min_support:
        return HypothesisVerdict(
            "H2",
            "rejected",
            f"no sequence reaches the minimum support of {thresholds.reject_min_support} "
            f"(max support {m})",
            counts,
        )
    if model_count > 0 and m / model_count >= thresholds.support_fraction:
        return HypothesisVerdict(
            "H2",
            "supported",
            f"a sequence is contained in {m} of {model_count} mismatched models "
            f"(fraction threshold {thresholds.support_fraction})",
            counts,
        )
    return HypothesisVerdict(
        "H2",
        "inconclusive",
        f"max support {m} of {model_count} models sits between the rejection and "
        "support thresholds",
        counts,
    )


@dataclass
class SequenceReport:
    """Everything the sequence pipeline produces for one corpus trio."""

    regions: dict[str, SeqSet]
    reduced: dict[str, SeqSet]
    excluded: dict[str, list[str]]
    h2: HypothesisVerdict

    def to_json_dict(self) -> dict:
        return {
            "regions": {
                name: {"unique": len(self.regions[name]), "reduced": len(self.reduced[name])}
                for name in REGION_ORDER
            },
            "unique_to_mismatched_reduced": [
                list(s) for s in self.reduced["unique_to_mismatched"].sorted()
            ],
            "excluded_models": {role: list(ids) for role, ids in sorted(self.excluded.items())},
            "h2": {
                "hypothesis": self.h2.hypothesis,
                "outcome": self.h2.outcome,
                "evidence": self.h2.evidence,
                "counts": self.h2.counts,
            },
        }


REGION_ORDER = (
    "shared_within_mismatched",
    "shared_with_correct",
    "shared_with_testsuite",
    "unique_to_mismatched",
)


def sequence_report(
    mismatched: Corpus,
    correct: Corpus,
    test_suite: Corpus,
    min_len: int = DEFAULT_MIN_SEQ_LEN,
    budget: PathBudget = PathBudget(),
    thresholds: H2Thresholds = H2Thresholds(),
) -> SequenceReport:
    """Mine all four regions, reduce each, and decide the hypothesis.

    Paths are enumerated once per corpus; models over the path budget are
    excluded from mining and listed in the report.
    """
    paths_m, excl_m = corpus_paths(mismatched, budget)
    paths_c, excl_c = corpus_paths(correct, budget)
    paths_t, excl_t = corpus_paths(test_suite, budget)

    within = _shared_within_paths(paths_m, mismatched.role, min_len)
    with_correct = _shared_between_paths(paths_m, paths_c, mismatched.role, correct.role, min_len)
    with_tests = _shared_between_paths(paths_m, paths_t, mismatched.role, test_suite.role, min_len)
    unique = seq_difference(within, with_correct, "unique_to_mismatched")

    regions = {
        "shared_within_mismatched": SeqSet(within.sequences, "shared_within_mismatched"),
        "shared_with_correct": SeqSet(with_correct.sequences, "shared_with_correct"),
        "shared_with_testsuite": SeqSet(with_tests.sequences, "shared_with_testsuite"),
        "unique_to_mismatched": unique,
    }
    reduced = {name: reduce_sequences(seqs, min_len) for name, seqs in regions.items()}

    # Support is measured against the mismatched models that stayed in budget.
    supports = {
        seq: _support_in_paths(seq, paths_m)
        for seq in reduced["unique_to_mismatched"].sequences
    }
    h2 = _decide_h2(supports, len(mismatched.models), len(excl_m), thresholds)

    return SequenceReport(
        regions=regions,
        reduced=reduced,
        excluded={
            mismatched.role: excl_m,
            correct.role: excl_c,
            test_suite.role: excl_t,
        },
        h2=h2,
    )


def _check_min_len(min_len: int) -> None:
    if min_len < 1:
        raise MalformedInput(f"min sequence length must be at least 1, got {min_len}")
