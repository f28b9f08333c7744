#!/usr/bin/env python3
"""Walk a handful of conversion attempts through outcome classification.

Builds a throwaway manifest with one record per pipeline stage, dumps a
few tensors, and tabulates the verdicts.  Everything happens in a temp
directory; run it from anywhere.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from convaudit.difftest import classify_record, load_manifest, summarize
from convaudit.tensors import make_tensor, write_tensor_dump


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="convaudit-demo-"))

    # Two inference runs: one drifted in a single element, one agreed.
    original = make_tensor("f32", (4,), np.array([0.1, 0.2, 0.3, 0.4], dtype="<f4"))
    drifted = make_tensor("f32", (4,), np.array([0.1, 0.2, 0.31, 0.4], dtype="<f4"))
    write_tensor_dump(original, workdir / "m4-orig.td")
    write_tensor_dump(drifted, workdir / "m4-conv.td")
    write_tensor_dump(original, workdir / "m5-orig.td")
    write_tensor_dump(original, workdir / "m5-conv.td")

    records = [
        {
            "model_id": "m1",
            "converter": "tf2onnx",
            "stage_reached": "wrapper_error",
            "error_text": "preprocessing config not found",
            "kind": "real",
        },
        {
            "model_id": "m2",
            "converter": "torch_onnx",
            "stage_reached": "conversion_error",
            "error_text": "unsupported operator aten::unfold",
            "kind": "synthetic",
        },
        {
            "model_id": "m3",
            "converter": "torch_onnx",
            "stage_reached": "load_error",
            "error_text": "INVALID_GRAPH: missing input shape",
            "kind": "synthetic",
        },
        {
            "model_id": "m4",
            "converter": "torch_onnx",
            "stage_reached": "inference_done",
            "output_pairs": [["m4-orig.td", "m4-conv.td"]],
            "kind": "synthetic",
        },
        {
            "model_id": "m5",
            "converter": "torch_onnx",
            "stage_reached": "inference_done",
            "output_pairs": [["m5-orig.td", "m5-conv.td"]],
            "kind": "synthetic",
        },
    ]
    manifest = workdir / "manifest.jsonl"
    manifest.write_text("".join(json.dumps(r) + "\n" for r in records))

    print(f"manifest: {manifest}\n")
    loaded = load_manifest(manifest)
    verdicts = []
    for record in loaded:
        verdict = classify_record(record)
        verdicts.append((verdict, record.converter, record.kind))
        diff = "" if verdict.max_abs_diff is None else f"  max|diff|={verdict.max_abs_diff:g}"
        reason = f"  ({verdict.reason})" if verdict.reason else ""
        print(f"{record.model_id}: {verdict.category}{diff}{reason}")

    # m4's 0.01 drift dwarfs the 1e-7 tolerance; m5 agrees exactly.
    print()
    print(summarize(verdicts).to_text())


if __name__ == "__main__":
    main()
