"""Acceptance criteria for the primary component.

Each criterion is one test that prints a single visible line
``[criterion N] PASS|FAIL - summary`` regardless of capture settings, then
asserts.  All fixtures are committed files; nothing here depends on the
conversion harness being installed.
"""

import json
import random
import subprocess
import sys
import time
from itertools import combinations
from pathlib import Path

import numpy as np

from convaudit.difftest import (
    BEHAVIOURAL_DIFFERENCE,
    SUCCESS,
    compare_outputs,
    max_abs_diff,
)
from convaudit.corpora import load_corpus_dir
from convaudit.graph import make_corpus
from convaudit.opsets import evaluate_h1, op_set_report
from convaudit.sequences import (
    SeqSet,
    common_sequences,
    evaluate_h2,
    reduce_sequences,
    sequence_report,
)
from convaudit.taxonomy import joint, marginal, parse_records
from convaudit.tensors import make_tensor
from helpers import (
    all_substrings,
    brute_force_common,
    brute_force_paths,
    random_dag,
)

ROOT = Path(__file__).resolve().parent
FIXTURES = ROOT / "fixtures"
ORACLE = ROOT / "oracles" / "seq_oracle.py"
DATA = ROOT.parent / "src" / "convaudit" / "data"


def report(capsys, n: int, problems: list[str], summary: str) -> None:
    status = "PASS" if not problems else "FAIL"
    with capsys.disabled():
        print(f"[criterion {n}] {status} - {summary}")
    assert not problems, "; ".join(problems)


def f64(values):
    return make_tensor("f64", (len(values),), np.array(values, dtype="<f8"))


def load_trio(name):
    base = FIXTURES / name
    m, _ = load_corpus_dir(base / "mismatched", "mismatched")
    c, _ = load_corpus_dir(base / "correct", "correct")
    t, _ = load_corpus_dir(base / "testsuite", "test_suite")
    return m, c, t


def test_criterion_1_taxonomy_reproduction(capsys):
    """Bundled 200-record dataset reproduces the reference distributions."""
    started = time.perf_counter()
    problems = []
    records = parse_records((DATA / "failure_records.csv").read_bytes())

    symptom_expected = {
        "Crash": 112,
        "WrongModel": 65,
        "BuildFailure": 5,
        "BadPerformance": 3,
        "Hang": 0,
        "Unreported": 15,
    }
    table = marginal(records, "symptom")
    for label, count in symptom_expected.items():
        if table.row_total(label) != count:
            problems.append(f"symptom {label}: {table.row_total(label)} != {count}")
    if table.grand_total != 200:
        problems.append(f"total {table.grand_total} != 200")

    joint_expected = {
        "tf2onnx": {
            ("Incompatibility", "Crash"): 19,
            ("TypeProblem", "WrongModel"): 17,
            ("Others", "Crash"): 8,
            ("Others", "BuildFailure"): 3,
            ("Others", "Unreported"): 6,
        },
        "torch_onnx": {
            ("Incompatibility", "Crash"): 28,
            ("TypeProblem", "WrongModel"): 13,
            ("Others", "Crash"): 8,
            ("Others", "WrongModel"): 3,
            ("Others", "BuildFailure"): 2,
            ("Others", "Unreported"): 2,
        },
    }
    for jt in joint(records):
        for (row, col), count in joint_expected[jt.converter].items():
            if jt.counts[row][col] != count:
                problems.append(
                    f"{jt.converter} {row}x{col}: {jt.counts[row][col]} != {count}"
                )

    elapsed = time.perf_counter() - started
    if elapsed >= 1.0:
        problems.append(f"runtime {elapsed:.2f}s >= 1s")
    report(capsys, 1, problems, f"taxonomy reproduction, exact ({elapsed:.2f}s)")


def test_criterion_2_cross_table_consistency(capsys):
    """Cause marginals from the same dataset hit the published top-5 counts."""
    records = parse_records((DATA / "failure_records.csv").read_bytes())
    table = marginal(records, "cause")
    expected = {
        "Incompatibility:External": 55,
        "TypeProblem:Node": 46,
        "AlgorithmicError": 24,
        "ShapeProblem": 21,
        "APIMisuse": 12,
    }
    problems = [
        f"{row}: {table.row_total(row)} != {count}"
        for row, count in expected.items()
        if table.row_total(row) != count
    ]
    report(capsys, 2, problems, "cause marginals, exact")


def test_criterion_3_difference_criterion(capsys):
    """Strict threshold semantics at 1e-7, boundary exact."""
    problems = []
    just_under = compare_outputs([(f64([0.0]), f64([9.99e-8]))])
    if just_under.category != SUCCESS:
        problems.append(f"9.99e-8 gave {just_under.category}, not Success")
    boundary = compare_outputs([(f64([0.0]), f64([1.0e-7]))])
    if boundary.category != BEHAVIOURAL_DIFFERENCE:
        problems.append(f"1.0e-7 gave {boundary.category}, not BehaviouralDifference")
    a = make_tensor("f32", (2, 3), np.zeros((2, 3), dtype="<f4"))
    b = make_tensor("f32", (3, 2), np.zeros((3, 2), dtype="<f4"))
    shaped = compare_outputs([(a, b)])
    if shaped.category != BEHAVIOURAL_DIFFERENCE or shaped.reason != "shape mismatch":
        problems.append(f"shape mismatch gave ({shaped.category}, {shaped.reason})")
    same = compare_outputs([(f64([1.0, 2.0]), f64([1.0, 2.0]))])
    if same.category != SUCCESS or same.max_abs_diff != 0.0:
        problems.append(f"identical gave ({same.category}, {same.max_abs_diff})")
    if max_abs_diff(f64([1.0]), f64([1.0])) != 0.0:
        problems.append("max_abs_diff(a, a) != 0")
    report(capsys, 3, problems, "difference criterion boundaries, exact")


def test_criterion_4_simple_path_oracle(capsys):
    """100 seeded random DAGs: library paths == brute force, as multisets."""
    from convaudit.sequences import simple_paths

    started = time.perf_counter()
    problems = []
    for seed in range(100):
        g = random_dag(random.Random(seed), max_nodes=12, model_id=f"m{seed}")
        if sorted(simple_paths(g)) != sorted(brute_force_paths(g)):
            problems.append(f"seed {seed} diverges")
    elapsed = time.perf_counter() - started
    if elapsed >= 10.0:
        problems.append(f"runtime {elapsed:.2f}s >= 10s")
    report(capsys, 4, problems, f"simple-path oracle, 100 seeds ({elapsed:.2f}s)")


def test_criterion_5_common_sequence_oracle(capsys):
    """100 seeded path pairs: mined runs == substring-set intersection."""
    started = time.perf_counter()
    problems = []
    alphabet = "abcde"
    for seed in range(100):
        rng = random.Random(1000 + seed)
        p = tuple(rng.choice(alphabet) for _ in range(rng.randint(1, 12)))
        q = tuple(rng.choice(alphabet) for _ in range(rng.randint(1, 12)))
        got = common_sequences([p], [q], min_len=3).sequences
        want = brute_force_common([p], [q], 3)
        if got != want:
            problems.append(f"seed {seed}: {sorted(got)} != {sorted(want)}")
    elapsed = time.perf_counter() - started
    if elapsed >= 10.0:
        problems.append(f"runtime {elapsed:.2f}s >= 10s")
    report(capsys, 5, problems, f"common-sequence oracle, 100 seeds ({elapsed:.2f}s)")


def test_criterion_6_reduction_properties(capsys):
    """100 seeded sequence sets: antichain, coverage, idempotence; plus the
    canonical shortening example."""
    problems = []
    example = reduce_sequences(
        SeqSet(
            frozenset(
                {
                    ("a", "a", "a", "a", "b", "d"),
                    ("a", "a", "a", "a", "b", "c"),
                }
            ),
            "example",
        )
    )
    if example.sequences != {("a", "a", "a", "a", "b")}:
        problems.append(f"canonical example reduced to {example.sorted()}")

    for seed in range(100):
        rng = random.Random(2000 + seed)
        seqs = {
            tuple(rng.choice("abc") for _ in range(rng.randint(3, 8)))
            for _ in range(rng.randint(1, 6))
        }
        reduced = reduce_sequences(SeqSet(frozenset(seqs), "t")).sequences
        for s, t in combinations(reduced, 2):
            small, big = sorted((s, t), key=len)
            if len(small) < len(big) and small in all_substrings(big, 1):
                problems.append(f"seed {seed}: not an antichain")
        if not all(
            any(r in all_substrings(original, 1) for r in reduced) for original in seqs
        ):
            problems.append(f"seed {seed}: coverage broken")
        if reduce_sequences(SeqSet(frozenset(reduced), "t")).sequences != reduced:
            problems.append(f"seed {seed}: not idempotent")
    report(capsys, 6, problems, "reduction properties, 100 seeds + canonical example")


def test_criterion_7_region_algebra_vs_oracle_script(capsys):
    """Committed 8-model trio: all four regions, raw and reduced, equal the
    committed brute-force oracle script's output, exactly."""
    problems = []
    proc = subprocess.run(
        [
            sys.executable,
            str(ORACLE),
            str(FIXTURES / "seq_trio" / "mismatched"),
            str(FIXTURES / "seq_trio" / "correct"),
            str(FIXTURES / "seq_trio" / "testsuite"),
            "3",
        ],
        capture_output=True,
        text=True,
        check=True,
    )
    oracle = json.loads(proc.stdout)

    m, c, t = load_trio("seq_trio")
    got = sequence_report(m, c, t)
    for name in got.regions:
        lib_raw = [list(s) for s in sorted(got.regions[name].sequences)]
        lib_red = [list(s) for s in sorted(got.reduced[name].sequences)]
        if lib_raw != oracle["regions"][name]:
            problems.append(f"{name} raw: {lib_raw} != {oracle['regions'][name]}")
        if lib_red != oracle["reduced"][name]:
            problems.append(f"{name} reduced: {lib_red} != {oracle['reduced'][name]}")
    if got.h2.counts["max_support"] != oracle["max_support"]:
        problems.append(
            f"max support {got.h2.counts['max_support']} != {oracle['max_support']}"
        )
    # The frozen copy of the oracle output must match the live run.
    frozen = json.loads((FIXTURES / "seq_trio" / "oracle_expected.json").read_text())
    if frozen != oracle:
        problems.append("frozen oracle snapshot is stale")
    report(capsys, 7, problems, "region algebra vs oracle script, exact")


def test_criterion_8_hypothesis_rules(capsys):
    """Operator-overlap rejection at 95%; sequence rule at support 1 and n."""
    problems = []
    m, c, t = load_trio("h1_reject")
    verdict = evaluate_h1(op_set_report(m, c, t), m)
    if verdict.outcome != "rejected":
        problems.append(f"95% overlap gave {verdict.outcome}, not rejected")
    if verdict.counts["overlap"] != 0.95:
        problems.append(f"overlap {verdict.counts['overlap']} != 0.95")

    corpus, _ = load_corpus_dir(FIXTURES / "h2_corpus" / "mismatched", "mismatched")
    lone = evaluate_h2(SeqSet(frozenset({("Relu", "Add", "Mul")}), "u"), corpus)
    if lone.outcome != "rejected" or lone.counts["max_support"] != 1:
        problems.append(
            f"support-1 gave ({lone.outcome}, {lone.counts['max_support']})"
        )
    full = evaluate_h2(SeqSet(frozenset({("Conv", "Relu", "MaxPool")}), "u"), corpus)
    n = len(corpus.models)
    if full.outcome != "supported" or full.counts["max_support"] != n:
        problems.append(
            f"support-n gave ({full.outcome}, {full.counts['max_support']}), n={n}"
        )
    report(capsys, 8, problems, "hypothesis decision rules, exact outcomes")


def test_criterion_9_cli_determinism(capsys):
    """Every command, both formats, run twice: byte-identical payloads."""
    problems = []
    trio = [
        "--mismatched", str(FIXTURES / "seq_trio" / "mismatched"),
        "--correct", str(FIXTURES / "seq_trio" / "correct"),
        "--testsuite", str(FIXTURES / "seq_trio" / "testsuite"),
    ]
    invocations = {
        "classify": ["classify", "--manifest", str(FIXTURES / "classify" / "manifest.jsonl")],
        "ops": ["ops"] + trio,
        "seqs": ["seqs"] + trio,
        "taxonomy-symptom": [
            "taxonomy", "--records", str(DATA / "failure_records.csv"),
            "--mode", "symptom",
        ],
        "taxonomy-joint": [
            "taxonomy", "--records", str(DATA / "failure_records.csv"),
            "--mode", "joint",
        ],
    }
    for name, argv in invocations.items():
        for fmt in ("text", "json"):
            outputs = []
            for _ in range(2):
                proc = subprocess.run(
                    [sys.executable, "-m", "convaudit", "--format", fmt] + argv,
                    capture_output=True,
                )
                if proc.returncode != 0:
                    problems.append(f"{name}/{fmt} exited {proc.returncode}")
                outputs.append(proc.stdout)
            if outputs[0] != outputs[1]:
                problems.append(f"{name}/{fmt} payload differs between runs")
            if not outputs[0]:
                problems.append(f"{name}/{fmt} produced no payload")
    report(capsys, 9, problems, "CLI determinism, byte-identical payloads")
