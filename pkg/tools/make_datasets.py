"""One-shot generator for the bundled reference datasets.

Run from the repository root; rewrites src/convaudit/data/*.csv.  Cell
values are spelled out here so a reviewer can audit every count; the
derivations are documented in src/convaudit/data/README.md.
"""

from __future__ import annotations

import csv
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "convaudit" / "data"

# (cause spelling, symptom, count) per converter.  Within each cause
# category the subcategory assignment is deterministic and documented as
# synthetic where the reference tables publish only category totals.
TF_CELLS = [
    ("Incompatibility:External", "Crash", 19),
    ("Incompatibility:External", "WrongModel", 4),
    ("Incompatibility:Internal", "Unreported", 2),
    ("TypeProblem:Node", "Crash", 8),
    ("TypeProblem:Node", "WrongModel", 13),
    ("TypeProblem:Conventional", "WrongModel", 3),
    ("TypeProblem:Tensor", "WrongModel", 1),
    ("AlgorithmicError:Optimization", "Crash", 4),
    ("AlgorithmicError:Optimization", "WrongModel", 10),
    ("AlgorithmicError:Optimization", "BadPerformance", 2),
    ("AlgorithmicError:Optimization", "Unreported", 2),
    ("ShapeProblem", "Crash", 5),
    ("ShapeProblem", "WrongModel", 4),
    ("APIMisuse", "Crash", 6),
    ("OTHERS", "Crash", 8),
    ("OTHERS", "BuildFailure", 3),
    ("OTHERS", "Unreported", 6),
]

PT_CELLS = [
    ("Incompatibility:External", "Crash", 28),
    ("Incompatibility:External", "WrongModel", 3),
    ("Incompatibility:External", "Unreported", 1),
    ("TypeProblem:Node", "Crash", 14),
    ("TypeProblem:Node", "WrongModel", 11),
    ("TypeProblem:Conventional", "WrongModel", 2),
    ("TypeProblem:Tensor", "BadPerformance", 1),
    ("TypeProblem:Tensor", "Unreported", 1),
    ("AlgorithmicError:Tracing", "Crash", 3),
    ("AlgorithmicError:Tracing", "WrongModel", 3),
    ("ShapeProblem", "Crash", 4),
    ("ShapeProblem", "WrongModel", 7),
    ("ShapeProblem", "Unreported", 1),
    ("APIMisuse", "Crash", 5),
    ("APIMisuse", "WrongModel", 1),
    ("OTHERS", "Crash", 8),
    ("OTHERS", "WrongModel", 3),
    ("OTHERS", "BuildFailure", 2),
    ("OTHERS", "Unreported", 2),
]

# The Others bin holds low-frequency causes; composition is synthetic
# (only the bin totals are derived), assigned round-robin.
OTHERS_LABELS = [
    "Other:Misconfiguration",
    "Other:IncorrectExceptionHandling",
    "Other:IncorrectAssignment",
    "Testing",
    "Other:Typo",
    "Other:Documentation",
    "Other:IncorrectNumericalComputation",
]

LOCATION_COUNTS = {
    "tf2onnx": [
        ("LoadModel", 5),
        ("NodeConversion", 70),
        ("GraphOptimization", 14),
        ("Protobuf", 1),
        ("Validation", 0),
        ("NotDistinguishable", 10),
    ],
    "torch_onnx": [
        ("LoadModel", 6),
        ("NodeConversion", 78),
        ("GraphOptimization", 5),
        ("Protobuf", 0),
        ("Validation", 3),
        ("NotDistinguishable", 8),
    ],
}


def expand(converter: str, prefix: str, cells) -> list[list[str]]:
    rows = []
    others_seen = 0
    serial = 0
    for cause, symptom, count in cells:
        for _ in range(count):
            serial += 1
            if cause == "OTHERS":
                spelled = OTHERS_LABELS[others_seen % len(OTHERS_LABELS)]
                others_seen += 1
            else:
                spelled = cause
            rows.append([f"{prefix}-{serial:03d}", converter, symptom, spelled, "", ""])
    assert serial == 100, (converter, serial)
    return rows


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    header = ["record_id", "converter", "symptom", "cause", "location", "source_url"]

    with (DATA / "failure_records.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(expand("tf2onnx", "tf", TF_CELLS))
        writer.writerows(expand("torch_onnx", "pt", PT_CELLS))

    with (DATA / "failure_locations.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for converter, prefix in (("tf2onnx", "loc-tf"), ("torch_onnx", "loc-pt")):
            serial = 0
            for location, count in LOCATION_COUNTS[converter]:
                for _ in range(count):
                    serial += 1
                    writer.writerow(
                        [f"{prefix}-{serial:03d}", converter, "Unreported", "Other:Unlabeled", location, ""]
                    )
            assert serial == 100, (converter, serial)

    print("wrote", DATA / "failure_records.csv")
    print("wrote", DATA / "failure_locations.csv")


if __name__ == "__main__":
    main()
