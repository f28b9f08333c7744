"""Conversion pipeline driver.

Each model's run is an isolated subprocess so a crashing converter cannot
take the campaign down with it.  The worker reports its result as a manifest
record; if the worker process dies without one, the parent synthesizes a
record from the last stage marker the worker left behind.  Either way every
run ends as a stage outcome, never as an exception.

The manifest writer is the single serialization point: records are appended
in completion order while the campaign runs, then the file is rewritten
sorted by model id at the end.
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from .generator import TENSOR_SHAPE

# CLI lane name -> converter id used in manifest records
CONVERTER_IDS = {"torch": "torch_onnx", "tf": "tf2onnx"}

# progress marker -> stage recorded when the run dies there
STAGE_ON_DEATH = {
    "wrapper": "wrapper_error",
    "convert": "conversion_error",
    "load": "load_error",
    "execute": "execution_error",
}


def make_inputs(seed: int, count: int) -> list[np.ndarray]:
    """Seeded random model inputs, f32, one fixed shape."""
    rng = np.random.default_rng(seed)
    return [rng.standard_normal(TENSOR_SHAPE, dtype=np.float32) for _ in range(count)]


def run_pipeline(
    entry: dict,
    converter: str,
    *,
    out_dir: str | Path,
    input_count: int = 100,
    input_seed: int | None = None,
    timeout: float = 600.0,
) -> dict:
    """Run one model through export, load, and inference; return its record.

    ``entry`` needs keys model_id, seed, node_count, vocabulary; the worker
    regenerates the model from them (generation is deterministic).  Input
    randomness defaults to seed + 1 so inputs do not replay the topology draw.
    """
    if converter not in CONVERTER_IDS:
        raise ValueError(f"unknown converter lane {converter!r}")
    out_dir = Path(out_dir)
    mid = entry["model_id"]
    work = out_dir / "work" / mid
    work.mkdir(parents=True, exist_ok=True)
    dumps_dir = out_dir / "dumps" / mid
    dumps_dir.mkdir(parents=True, exist_ok=True)

    job = {
        "model_id": mid,
        "seed": entry["seed"],
        "node_count": entry["node_count"],
        "vocabulary": list(entry["vocabulary"]),
        "converter": converter,
        "input_count": input_count,
        "input_seed": entry["seed"] + 1 if input_seed is None else input_seed,
        "manifest_dir": str(out_dir),
        "dumps_dir": str(dumps_dir),
        "work_dir": str(work),
        "result_path": str(work / "result.json"),
        "progress_path": str(work / "progress.txt"),
    }
    job_path = work / "job.json"
    job_path.write_text(json.dumps(job, indent=2) + "\n", encoding="utf-8")

    cmd = [sys.executable, "-m", "convharness._worker", str(job_path)]
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout)
        failure = None if proc.returncode == 0 else f"worker process died (exit {proc.returncode})"
        stderr = proc.stderr or ""
    except subprocess.TimeoutExpired as exc:
        failure = f"worker timed out after {timeout:g}s"
        stderr = exc.stderr if isinstance(exc.stderr, str) else ""

    result_path = work / "result.json"
    if result_path.exists():
        try:
            return json.loads(result_path.read_text(encoding="utf-8"))
        except ValueError:
            pass  # partial write: treat as a dead worker

    stage = "wrapper"
    progress = work / "progress.txt"
    if progress.exists():
        marker = progress.read_text(encoding="utf-8").strip()
        if marker in STAGE_ON_DEATH:
            stage = marker
    error = f"{failure or 'worker produced no result'} during {stage} stage"
    tail = " ".join(stderr.split())[-300:]
    if tail:
        error += f": {tail}"
    return {
        "model_id": mid,
        "converter": CONVERTER_IDS[converter],
        "stage_reached": STAGE_ON_DEATH[stage],
        "error_text": error,
        "kind": "synthetic",
    }


def run_campaign(
    models_dir: str | Path,
    converter: str,
    *,
    out_dir: str | Path,
    input_count: int = 100,
    timeout: float = 600.0,
) -> tuple[list[dict], Path]:
    """Run every model of a generated corpus; write manifest.jsonl.

    Returns the records (sorted by model id, matching the final manifest) and
    the manifest path.
    """
    models_dir = Path(models_dir)
    out_dir = Path(out_dir)
    index_path = models_dir / "index.json"
    if not index_path.is_file():
        raise FileNotFoundError(f"{index_path}: no corpus index")
    index = json.loads(index_path.read_text(encoding="utf-8"))
    vocabulary = list(index["vocabulary"])

    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.jsonl"
    records: list[dict] = []
    with manifest_path.open("w", encoding="utf-8") as fh:
        for entry in index["models"]:
            record = run_pipeline(
                {**entry, "vocabulary": vocabulary},
                converter,
                out_dir=out_dir,
                input_count=input_count,
                timeout=timeout,
            )
            fh.write(json.dumps(record) + "\n")
            fh.flush()
            records.append(record)
    records.sort(key=lambda r: r["model_id"])
    manifest_path.write_text(
        "".join(json.dumps(r) + "\n" for r in records), encoding="utf-8"
    )
    return records, manifest_path
