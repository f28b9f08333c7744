"""Failure taxonomy analytics.

Labeled failure reports tabulate along three dimensions:

    symptom   Crash, WrongModel, BuildFailure, BadPerformance, Hang, Unreported
    cause     Incompatibility(External|Internal|Resource),
              TypeProblem(Node|Tensor|Conventional),
              AlgorithmicError(Optimization|Tracing),
              ShapeProblem, APIMisuse, Testing, Other(<label>)
    location  LoadModel, NodeConversion, GraphOptimization, Protobuf,
              Validation, NotDistinguishable

Records arrive as CSV with header
``record_id,converter,symptom,cause,location,source_url``; cause spells a
bare category (``ShapeProblem``), ``Category:Subcategory``
(``TypeProblem:Node``) or ``Other:<free label>``.  location and source_url
may be empty.  Spellings are case-sensitive.

Marginal tables count records per enum value per converter; the joint
table crosses the five high-frequency cause categories (everything else
bins into Others) against symptoms, one table per converter.  Zero rows
render; a packaging step that silently drops an empty row would hide the
difference between "never happens" and "not measured".

The bundled datasets under ``data/`` carry a fixed reference distribution
used by the test suite; ``data/README.md`` documents which cells are
primary and which are derived or synthetic filler.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import MalformedInput, MissingField, UnknownEnumValue
from .util import pct_half_up, render_columns

SYMPTOMS = ("Crash", "WrongModel", "BuildFailure", "BadPerformance", "Hang", "Unreported")

LOCATIONS = (
    "LoadModel",
    "NodeConversion",
    "GraphOptimization",
    "Protobuf",
    "Validation",
    "NotDistinguishable",
)

CAUSE_SUBCATEGORIES: dict[str, tuple[str, ...]] = {
    "Incompatibility": ("External", "Internal", "Resource"),
    "TypeProblem": ("Node", "Tensor", "Conventional"),
    "AlgorithmicError": ("Optimization", "Tracing"),
    "ShapeProblem": (),
    "APIMisuse": (),
    "Testing": (),
}

# High-frequency cause categories get their own joint-table rows; Testing
# and Other(...) bin into Others.
TOP_CAUSES = ("Incompatibility", "TypeProblem", "AlgorithmicError", "ShapeProblem", "APIMisuse")
OTHERS = "Others"

# Cause-marginal row order: subcategory rows where the taxonomy splits,
# one combined row for AlgorithmicError, then the binned remainder.
CAUSE_ROWS = (
    ("Incompatibility", "External"),
    ("Incompatibility", "Internal"),
    ("Incompatibility", "Resource"),
    ("TypeProblem", "Node"),
    ("TypeProblem", "Conventional"),
    ("TypeProblem", "Tensor"),
    ("AlgorithmicError", None),
    ("ShapeProblem", None),
    ("APIMisuse", None),
    (OTHERS, None),
)

# Joint-table column order; the historically empty Hang column renders last.
JOINT_SYMPTOM_ORDER = ("Crash", "WrongModel", "BadPerformance", "BuildFailure", "Unreported", "Hang")

# Reference distribution for general DL-compiler failures (display only,
# never aggregated with record counts).
REFERENCE_SYMPTOM_COUNTS = {
    "Crash": 226,
    "WrongModel": 100,
    "BuildFailure": 3,
    "BadPerformance": 6,
    "Hang": 4,
    "Unreported": 20,
}
REFERENCE_SYMPTOM_TOTAL = 359

MODES = ("symptom", "cause", "location", "joint")


@dataclass(frozen=True)
class Cause:
    category: str
    detail: str | None = None

    def spelled(self) -> str:
        return self.category if self.detail is None else f"{self.category}:{self.detail}"


@dataclass(frozen=True)
class FailureRecord:
    record_id: str
    converter: str
    symptom: str
    cause: Cause
    location: str | None = None
    source_url: str | None = None


def parse_cause(text: str, line: int) -> Cause:
    category, sep, detail = text.partition(":")
    if category == "Other":
        if not detail:
            raise UnknownEnumValue(line, "cause", text)
        return Cause("Other", detail)
    if category not in CAUSE_SUBCATEGORIES:
        raise UnknownEnumValue(line, "cause", text)
    legal = CAUSE_SUBCATEGORIES[category]
    if legal:
        if not sep or detail not in legal:
            raise UnknownEnumValue(line, "cause", text)
        return Cause(category, detail)
    if sep:
        raise UnknownEnumValue(line, "cause", text)
    return Cause(category)


_CSV_FIELDS = ("record_id", "converter", "symptom", "cause", "location", "source_url")
_REQUIRED = ("record_id", "converter", "symptom", "cause")


def parse_records(data: bytes | str) -> list[FailureRecord]:
    """Parse and validate a failure-record CSV.

    Line numbers in errors count the header as line 1.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"not valid UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(data))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedInput("empty CSV: no header") from None
    for col in header:
        if col not in _CSV_FIELDS:
            raise MalformedInput(f"unknown CSV column {col!r}")
    for col in _CSV_FIELDS:
        if col not in header:
            raise MissingField(1, col)
    if len(header) != len(set(header)):
        raise MalformedInput("repeated CSV column")
    index = {col: header.index(col) for col in _CSV_FIELDS}

    records: list[FailureRecord] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise MalformedInput(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        values = {col: row[index[col]].strip() for col in _CSV_FIELDS}
        for col in _REQUIRED:
            if not values[col]:
                raise MissingField(lineno, col)
        if values["symptom"] not in SYMPTOMS:
            raise UnknownEnumValue(lineno, "symptom", values["symptom"])
        location = values["location"] or None
        if location is not None and location not in LOCATIONS:
            raise UnknownEnumValue(lineno, "location", location)
        records.append(
            FailureRecord(
                record_id=values["record_id"],
                converter=values["converter"],
                symptom=values["symptom"],
                cause=parse_cause(values["cause"], lineno),
                location=location,
                source_url=values["source_url"] or None,
            )
        )
    return records


@dataclass
class DistributionTable:
    """Counts per row label per converter column, plus a Total column.

    Percentages are of the grand total, rendered on the Total column the
    way the source layout does.  reference, when present, is a
    display-only extra column.
    """

    dimension: str
    rows: list[str]
    converters: list[str]
    counts: dict[str, dict[str, int]]  # row -> converter -> count
    reference: dict[str, int] | None = None
    reference_total: int | None = None

    @property
    def grand_total(self) -> int:
        return sum(sum(per.values()) for per in self.counts.values())

    def row_total(self, row: str) -> int:
        return sum(self.counts[row].values())

    def to_json_dict(self) -> dict:
        total = self.grand_total
        out: dict = {
            "dimension": self.dimension,
            "converters": list(self.converters),
            "total": total,
            "rows": [
                {
                    "label": row,
                    "by_converter": {c: self.counts[row][c] for c in self.converters},
                    "total": self.row_total(row),
                    "percent": pct_half_up(self.row_total(row), total),
                }
                for row in self.rows
            ],
        }
        if self.reference is not None:
            out["reference"] = {
                "by_label": dict(self.reference),
                "total": self.reference_total,
            }
        return out

    def to_text(self) -> str:
        total = self.grand_total
        headers = [self.dimension] + list(self.converters) + ["total"]
        if self.reference is not None:
            headers.append("reference")
        body = []
        for row in self.rows:
            cells = [row] + [str(self.counts[row][c]) for c in self.converters]
            cells.append(f"{self.row_total(row)} ({pct_half_up(self.row_total(row), total)}%)")
            if self.reference is not None:
                ref = self.reference.get(row, 0)
                cells.append(f"{ref} ({pct_half_up(ref, self.reference_total or 0)}%)")
            body.append(cells)
        footer = ["total"] + [
            str(sum(self.counts[row][c] for row in self.rows)) for c in self.converters
        ]
        footer.append(str(total))
        if self.reference is not None:
            footer.append(str(self.reference_total))
        body.append(footer)
        return render_columns(headers, body)


def _converters_of(records: list[FailureRecord]) -> list[str]:
    return sorted({r.converter for r in records})


def _cause_row(cause: Cause) -> tuple[str, str | None]:
    if cause.category in ("Testing", "Other"):
        return (OTHERS, None)
    if cause.category == "AlgorithmicError":
        return ("AlgorithmicError", None)
    return (cause.category, cause.detail)


def marginal(records: list[FailureRecord], dimension: str) -> DistributionTable:
    """One-dimensional count table; rows follow the fixed taxonomy order.

    For ``location`` an extra "(none)" row collects unlabeled records so
    cells always sum to the record count.
    """
    converters = _converters_of(records)

    def empty_row() -> dict[str, int]:
        return {c: 0 for c in converters}

    if dimension == "symptom":
        rows = list(SYMPTOMS)
        counts = {row: empty_row() for row in rows}
        for r in records:
            counts[r.symptom][r.converter] += 1
        return DistributionTable(
            dimension,
            rows,
            converters,
            counts,
            reference=dict(REFERENCE_SYMPTOM_COUNTS),
            reference_total=REFERENCE_SYMPTOM_TOTAL,
        )
    if dimension == "cause":
        labels = {key: (f"{key[0]}:{key[1]}" if key[1] else key[0]) for key in CAUSE_ROWS}
        rows = [labels[key] for key in CAUSE_ROWS]
        counts = {row: empty_row() for row in rows}
        for r in records:
            counts[labels[_cause_row(r.cause)]][r.converter] += 1
        return DistributionTable(dimension, rows, converters, counts)
    if dimension == "location":
        rows = list(LOCATIONS)
        counts = {row: empty_row() for row in rows}
        none_row = {c: 0 for c in converters}
        for r in records:
            if r.location is None:
                none_row[r.converter] += 1
            else:
                counts[r.location][r.converter] += 1
        if any(none_row.values()):
            rows.append("(none)")
            counts["(none)"] = none_row
        return DistributionTable(dimension, rows, converters, counts)
    if dimension == "converter":
        rows = converters
        counts = {row: empty_row() for row in rows}
        for r in records:
            counts[r.converter][r.converter] += 1
        return DistributionTable(dimension, rows, converters, counts)
    raise MalformedInput(f"unknown marginal dimension {dimension!r}")


@dataclass
class JointTable:
    """Cause-category x symptom counts for a single converter."""

    converter: str
    rows: list[str]  # TOP_CAUSES + Others
    columns: list[str]
    counts: dict[str, dict[str, int]]

    def row_total(self, row: str) -> int:
        return sum(self.counts[row].values())

    def column_total(self, column: str) -> int:
        return sum(self.counts[row][column] for row in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "converter": self.converter,
            "columns": list(self.columns),
            "rows": [
                {
                    "cause": row,
                    "cells": {col: self.counts[row][col] for col in self.columns},
                    "total": self.row_total(row),
                }
                for row in self.rows
            ],
            "column_totals": {col: self.column_total(col) for col in self.columns},
            "total": sum(self.row_total(row) for row in self.rows),
        }

    def to_text(self) -> str:
        headers = [f"cause \\ symptom ({self.converter})"] + list(self.columns) + ["total"]
        body = []
        for row in self.rows:
            body.append(
                [row]
                + [str(self.counts[row][col]) for col in self.columns]
                + [str(self.row_total(row))]
            )
        body.append(
            ["total"]
            + [str(self.column_total(col)) for col in self.columns]
            + [str(sum(self.row_total(row) for row in self.rows))]
        )
        return render_columns(headers, body)


def joint(records: list[FailureRecord]) -> list[JointTable]:
    """Cause x symptom cross-tabulation, one table per converter."""
    rows = list(TOP_CAUSES) + [OTHERS]
    tables = []
    for converter in _converters_of(records):
        counts = {row: {col: 0 for col in JOINT_SYMPTOM_ORDER} for row in rows}
        for r in records:
            if r.converter != converter:
                continue
            category = _cause_row(r.cause)[0]
            if category not in TOP_CAUSES:
                category = OTHERS
            counts[category][r.symptom] += 1
        tables.append(
            JointTable(
                converter=converter,
                rows=rows,
                columns=list(JOINT_SYMPTOM_ORDER),
                counts=counts,
            )
        )
    return tables


def bundled_failure_records_path() -> Path:
    return Path(str(resources.files("convaudit").joinpath("data", "failure_records.csv")))


def bundled_location_records_path() -> Path:
    return Path(str(resources.files("convaudit").joinpath("data", "failure_locations.csv")))
