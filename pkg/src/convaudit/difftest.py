"""Differential-testing outcome classification.

A conversion attempt is recorded as the furthest pipeline stage it reached
plus, when inference ran on both sides, pairs of dumped output tensors.
Records classify into five outcome categories:

    WrapperError            the harness around the source model failed
    UnsuccessfulConversion  the converter itself failed
    UnsuccessfulLoad        the runtime refused or crashed on the converted model
    BehaviouralDifference   outputs disagree (or cannot be compared)
    Success                 every output pair agrees within tolerance

Agreement means the maximum absolute element-wise difference, computed in
f64, is strictly below the tolerance (default 1e-7).  Shape or dtype
mismatches and NaN asymmetries are behavioural differences carrying a
reason, not errors: a converter that changes an output's shape has
misbehaved, not the toolkit.

Manifests are JSON Lines, one record per line:

    {"model_id": "...", "converter": "...", "stage_reached": "...",
     "error_text": "...", "output_pairs": [["a.td", "b.td"], ...],
     "kind": "real" | "synthetic"}

error_text is required exactly on error stages; output_pairs (at least one
pair) exactly on inference_done.  kind is optional (default "unlabeled")
and only groups summary columns.  Tensor paths resolve relative to the
manifest's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInput, MalformedInput
from .tensors import Tensor, read_tensor_dump
from .util import pct_half_up, render_columns

WRAPPER_ERROR = "WrapperError"
UNSUCCESSFUL_CONVERSION = "UnsuccessfulConversion"
UNSUCCESSFUL_LOAD = "UnsuccessfulLoad"
BEHAVIOURAL_DIFFERENCE = "BehaviouralDifference"
SUCCESS = "Success"

# Summary row order (wrapper failures first, success last).
CATEGORY_ORDER = (
    WRAPPER_ERROR,
    UNSUCCESSFUL_CONVERSION,
    UNSUCCESSFUL_LOAD,
    BEHAVIOURAL_DIFFERENCE,
    SUCCESS,
)

ERROR_STAGES = ("wrapper_error", "conversion_error", "load_error", "execution_error")
STAGES = ERROR_STAGES + ("inference_done",)

_STAGE_CATEGORY = {
    "wrapper_error": WRAPPER_ERROR,
    "conversion_error": UNSUCCESSFUL_CONVERSION,
    "load_error": UNSUCCESSFUL_LOAD,
    "execution_error": UNSUCCESSFUL_LOAD,
}


@dataclass(frozen=True)
class TolerancePolicy:
    """threshold: strict upper bound on the max absolute difference.

    nan_equal: with True (default), NaN at identical positions counts as
    difference 0 while a NaN on one side only makes the pair incomparable;
    with False any NaN makes the pair incomparable.
    """

    threshold: float = 1e-7
    nan_equal: bool = True

    def __post_init__(self) -> None:
        if not self.threshold > 0:
            raise MalformedInput(f"tolerance threshold must be positive, got {self.threshold}")


@dataclass(frozen=True)
class Incomparable:
    reason: str


@dataclass(frozen=True)
class Verdict:
    model_id: str
    category: str
    max_abs_diff: float | None = None
    reason: str | None = None


@dataclass(frozen=True)
class ConversionRecord:
    model_id: str
    converter: str
    stage_reached: str
    error_text: str | None = None
    output_pairs: tuple[tuple[str, str], ...] = ()
    kind: str = "unlabeled"


def max_abs_diff(a: Tensor, b: Tensor, nan_equal: bool = True) -> float | Incomparable:
    """Maximum absolute element-wise difference, computed in f64.

    Incomparable when shapes differ, dtypes differ, or NaN appears on one
    side only (any NaN at all when nan_equal is False).  Equal values,
    including equal infinities, count as difference 0; empty tensors
    compare as 0.
    """
    if a.shape != b.shape:
        return Incomparable("shape mismatch")
    if a.dtype != b.dtype:
        return Incomparable("dtype mismatch")
    if a.size == 0:
        return 0.0
    x = a.data.astype(np.float64)
    y = b.data.astype(np.float64)
    nan_x = np.isnan(x)
    nan_y = np.isnan(y)
    if nan_equal:
        if (nan_x != nan_y).any():
            return Incomparable("nan in output")
        valid = ~nan_x
        if not valid.any():
            return 0.0
        x = x[valid]
        y = y[valid]
    elif nan_x.any() or nan_y.any():
        return Incomparable("nan in output")
    with np.errstate(invalid="ignore"):  # inf - inf is handled below
        diff = np.abs(x - y)
    diff[x == y] = 0.0  # equal infinities count as no difference
    return float(diff.max())


def compare_outputs(
    pairs: Sequence[tuple[Tensor, Tensor]], policy: TolerancePolicy = TolerancePolicy()
) -> Verdict:
    """Classify one model's output pairs; the worst pair decides."""
    if not pairs:
        raise EmptyInput("no output pairs to compare")
    worst = 0.0
    for original, converted in pairs:
        result = max_abs_diff(original, converted, nan_equal=policy.nan_equal)
        if isinstance(result, Incomparable):
            return Verdict("", BEHAVIOURAL_DIFFERENCE, None, result.reason)
        worst = max(worst, result)
    if worst < policy.threshold:
        return Verdict("", SUCCESS, worst, None)
    return Verdict("", BEHAVIOURAL_DIFFERENCE, worst, None)


def classify_record(record: ConversionRecord, policy: TolerancePolicy = TolerancePolicy()) -> Verdict:
    """Map a record to its outcome category.

    Error stages classify directly; execution failures group with load
    failures, keeping the raw stage in the reason.  inference_done reads
    the dumped pairs and compares them.
    """
    stage = record.stage_reached
    if stage in _STAGE_CATEGORY:
        reason = record.error_text or ""
        if stage == "execution_error":
            reason = f"execution_error: {reason}"
        return Verdict(record.model_id, _STAGE_CATEGORY[stage], None, reason)
    if stage != "inference_done":
        raise MalformedInput(f"record {record.model_id!r}: unknown stage {stage!r}")
    loaded = [
        (read_tensor_dump(orig), read_tensor_dump(conv)) for orig, conv in record.output_pairs
    ]
    verdict = compare_outputs(loaded, policy)
    return Verdict(record.model_id, verdict.category, verdict.max_abs_diff, verdict.reason)


@dataclass
class OutcomeTable:
    """Per-(converter, kind) outcome counts in CATEGORY_ORDER."""

    columns: tuple[tuple[str, str], ...]
    start: dict[tuple[str, str], int]
    counts: dict[str, dict[tuple[str, str], int]]

    def percent(self, category: str, column: tuple[str, str]) -> int:
        return pct_half_up(self.counts[category][column], self.start[column])

    def to_json_dict(self) -> dict:
        cols = []
        for col in self.columns:
            converter, kind = col
            rows = {
                cat: {
                    "count": self.counts[cat][col],
                    "percent": self.percent(cat, col),
                }
                for cat in CATEGORY_ORDER
            }
            cols.append(
                {"converter": converter, "kind": kind, "start": self.start[col], "outcomes": rows}
            )
        return {"columns": cols}

    def to_text(self) -> str:
        headers = ["outcome"] + [f"{c}/{k}" for c, k in self.columns]
        rows = [["start"] + [str(self.start[col]) for col in self.columns]]
        for cat in CATEGORY_ORDER:
            rows.append(
                [cat]
                + [
                    f"{self.counts[cat][col]} ({self.percent(cat, col)}%)"
                    for col in self.columns
                ]
            )
        return render_columns(headers, rows)


def summarize(items: Iterable[tuple[Verdict, str, str]]) -> OutcomeTable:
    """Tabulate (verdict, converter, kind) triples into an OutcomeTable."""
    start: dict[tuple[str, str], int] = {}
    counts: dict[str, dict[tuple[str, str], int]] = {cat: {} for cat in CATEGORY_ORDER}
    for verdict, converter, kind in items:
        col = (converter, kind)
        start[col] = start.get(col, 0) + 1
        counts[verdict.category][col] = counts[verdict.category].get(col, 0) + 1
    columns = tuple(sorted(start))
    for cat in CATEGORY_ORDER:
        counts[cat] = {col: counts[cat].get(col, 0) for col in columns}
    return OutcomeTable(columns=columns, start=dict(sorted(start.items())), counts=counts)


_RECORD_KEYS = {"model_id", "converter", "stage_reached", "error_text", "output_pairs", "kind"}


def parse_manifest_line(line: str, where: str, base_dir: Path | None = None) -> ConversionRecord:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{where}: not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise MalformedInput(f"{where}: record must be an object")
    for key in raw:
        if key not in _RECORD_KEYS:
            raise MalformedInput(f"{where}: unknown key {key!r}")
    for key in ("model_id", "converter", "stage_reached"):
        if not isinstance(raw.get(key), str) or not raw[key]:
            raise MalformedInput(f"{where}: missing or non-string {key!r}")
    stage = raw["stage_reached"]
    if stage not in STAGES:
        raise MalformedInput(f"{where}: unknown stage {stage!r}")
    error_text = raw.get("error_text")
    if stage in ERROR_STAGES:
        if not isinstance(error_text, str) or not error_text:
            raise MalformedInput(f"{where}: stage {stage} requires error_text")
    elif error_text is not None:
        raise MalformedInput(f"{where}: error_text is only legal on error stages")
    raw_pairs = raw.get("output_pairs", [])
    if not isinstance(raw_pairs, list) or any(
        not (isinstance(p, list) and len(p) == 2 and all(isinstance(s, str) for s in p))
        for p in raw_pairs
    ):
        raise MalformedInput(f"{where}: output_pairs must be an array of [original, converted]")
    if stage == "inference_done" and not raw_pairs:
        raise MalformedInput(f"{where}: inference_done requires at least one output pair")
    if stage != "inference_done" and raw_pairs:
        raise MalformedInput(f"{where}: output_pairs are only legal on inference_done")
    kind = raw.get("kind", "unlabeled")
    if not isinstance(kind, str) or not kind:
        raise MalformedInput(f"{where}: kind must be a non-empty string")

    def resolve(p: str) -> str:
        return str(base_dir / p) if base_dir is not None else p

    return ConversionRecord(
        model_id=raw["model_id"],
        converter=raw["converter"],
        stage_reached=stage,
        error_text=error_text,
        output_pairs=tuple((resolve(a), resolve(b)) for a, b in raw_pairs),
        kind=kind,
    )


def load_manifest(path: str | Path) -> list[ConversionRecord]:
    """Read a JSON-Lines manifest; tensor paths resolve against its directory."""
    path = Path(path)
    base = path.parent
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            records.append(parse_manifest_line(line, f"{path}:{lineno}", base))
    return records
