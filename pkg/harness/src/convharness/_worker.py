"""Subprocess body for a single pipeline run.

Invoked as ``python -m convharness._worker JOB_JSON``.  Regenerates the model
from the seed recorded in the job, then walks the stages: build the source
model and run it on the generated inputs (wrapper), export through the
converter's public entry point (convert), open a runtime session (load), run
the converted model (execute), and finally dump every original/converted
output pair.  The first failing stage ends the run as that stage's outcome,
with the error text captured verbatim.

The worker always tries to exit 0 with a result file; the parent only
synthesizes a record when the process dies outright.
"""

from __future__ import annotations

import json
import sys
import traceback
from pathlib import Path

import numpy as np

from .dumps import dump_tensor
from .generator import TENSOR_SHAPE, GeneratedModel, GenerationSpec, generate_model
from .pipeline import CONVERTER_IDS, STAGE_ON_DEATH, make_inputs


def _error_text(exc: BaseException) -> str:
    return "".join(traceback.format_exception_only(exc)).strip()


def _mark(progress: Path, stage: str) -> None:
    progress.write_text(stage, encoding="utf-8")


def _originals_torch(gen: GeneratedModel, inputs: list[np.ndarray]):
    import torch

    module = gen.torch_module().eval()
    originals = []
    with torch.no_grad():
        for arr in inputs:
            outs = module(torch.from_numpy(arr))
            outs = outs if isinstance(outs, tuple) else (outs,)
            originals.append([o.detach().cpu().numpy() for o in outs])
    return module, originals


def _originals_tf(gen: GeneratedModel, inputs: list[np.ndarray]):
    import tensorflow as tf

    fn = tf.function(
        gen.tf_callable(), input_signature=[tf.TensorSpec(TENSOR_SHAPE, tf.float32)]
    )
    originals = []
    for arr in inputs:
        outs = fn(tf.constant(arr))
        outs = outs if isinstance(outs, (tuple, list)) else (outs,)
        originals.append([np.asarray(o) for o in outs])
    return fn, originals


def _export_torch(module, example: np.ndarray, onnx_path: Path) -> None:
    import torch

    torch.onnx.export(module, (torch.from_numpy(example),), str(onnx_path))


def _export_tf(fn, onnx_path: Path) -> None:
    import tensorflow as tf
    import tf2onnx

    tf2onnx.convert.from_function(
        fn,
        input_signature=[tf.TensorSpec(TENSOR_SHAPE, tf.float32)],
        output_path=str(onnx_path),
    )


def _load_session(onnx_path: Path):
    import onnxruntime

    return onnxruntime.InferenceSession(str(onnx_path), providers=["CPUExecutionProvider"])


def _run_converted(session, inputs: list[np.ndarray]) -> list[list[np.ndarray]]:
    feed = session.get_inputs()[0].name
    return [session.run(None, {feed: arr}) for arr in inputs]


def execute(job: dict) -> dict:
    mid = job["model_id"]
    conv_id = CONVERTER_IDS[job["converter"]]
    progress = Path(job["progress_path"])

    def failed(stage: str, exc: BaseException) -> dict:
        return {
            "model_id": mid,
            "converter": conv_id,
            "stage_reached": STAGE_ON_DEATH[stage],
            "error_text": _error_text(exc),
            "kind": "synthetic",
        }

    _mark(progress, "wrapper")
    try:
        gen = generate_model(
            GenerationSpec(
                node_count=job["node_count"],
                seed=job["seed"],
                op_vocabulary=tuple(job["vocabulary"]),
            )
        )
        inputs = make_inputs(job["input_seed"], job["input_count"])
        if job["converter"] == "torch":
            source_model, originals = _originals_torch(gen, inputs)
        else:
            source_model, originals = _originals_tf(gen, inputs)
    except Exception as exc:
        return failed("wrapper", exc)

    _mark(progress, "convert")
    onnx_path = Path(job["work_dir"]) / f"{mid}.onnx"
    try:
        if job["converter"] == "torch":
            _export_torch(source_model, inputs[0], onnx_path)
        else:
            _export_tf(source_model, onnx_path)
    except Exception as exc:
        return failed("convert", exc)

    _mark(progress, "load")
    try:
        session = _load_session(onnx_path)
    except Exception as exc:
        return failed("load", exc)

    _mark(progress, "execute")
    try:
        converted = _run_converted(session, inputs)
        for orig_outs, conv_outs in zip(originals, converted):
            if len(conv_outs) != len(orig_outs):
                raise RuntimeError(
                    f"converted model produced {len(conv_outs)} outputs, "
                    f"expected {len(orig_outs)}"
                )
    except Exception as exc:
        return failed("execute", exc)

    dumps_dir = Path(job["dumps_dir"])
    manifest_dir = Path(job["manifest_dir"])
    pairs: list[list[str]] = []
    for j, (orig_outs, conv_outs) in enumerate(zip(originals, converted)):
        for k, (orig, conv) in enumerate(zip(orig_outs, conv_outs)):
            src = dumps_dir / f"i{j}-o{k}-src.td"
            cnv = dumps_dir / f"i{j}-o{k}-cnv.td"
            dump_tensor(orig, src)
            dump_tensor(np.asarray(conv), cnv)
            pairs.append(
                [src.relative_to(manifest_dir).as_posix(), cnv.relative_to(manifest_dir).as_posix()]
            )
    return {
        "model_id": mid,
        "converter": conv_id,
        "stage_reached": "inference_done",
        "output_pairs": pairs,
        "kind": "synthetic",
    }


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    job = json.loads(Path(args[0]).read_text(encoding="utf-8"))
    try:
        record = execute(job)
    except BaseException as exc:  # any leak must still become a stage outcome
        stage = "wrapper"
        progress = Path(job["progress_path"])
        if progress.exists():
            marker = progress.read_text(encoding="utf-8").strip()
            if marker in STAGE_ON_DEATH:
                stage = marker
        record = {
            "model_id": job["model_id"],
            "converter": CONVERTER_IDS[job["converter"]],
            "stage_reached": STAGE_ON_DEATH[stage],
            "error_text": f"harness worker fault: {_error_text(exc)}",
            "kind": "synthetic",
        }
    Path(job["result_path"]).write_text(json.dumps(record) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
