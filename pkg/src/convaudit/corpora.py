"""Loading model corpora from disk.

A corpus directory holds one model per file: ``.json`` files in the JSON
interchange form, ``.onnx`` files as serialized protobuf.  Other files are
ignored.  Files are visited in sorted name order so corpora are
deterministic regardless of filesystem enumeration.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from .errors import AuditError, MalformedInput
from .graph import Corpus, ModelGraph, make_corpus, parse_graph_json
from .onnx_pb import parse_onnx_protobuf


def load_graph_file(path: str | Path) -> ModelGraph:
    path = Path(path)
    data = path.read_bytes()
    if path.suffix == ".json":
        return parse_graph_json(data)
    if path.suffix == ".onnx":
        graph = parse_onnx_protobuf(data)
        if not graph.model_id:
            graph = dataclasses.replace(graph, model_id=path.stem)
        return graph
    raise MalformedInput(f"{path}: unknown model file extension {path.suffix!r}")


def load_corpus_dir(
    path: str | Path, role: str, lenient: bool = False
) -> tuple[Corpus, list[str]]:
    """Load every model file under ``path`` (non-recursive).

    Returns the corpus plus a list of skip notices ("<file>: <error>") for
    files that failed to parse.  With ``lenient`` false the first failure
    raises instead.
    """
    path = Path(path)
    if not path.is_dir():
        raise MalformedInput(f"{path}: not a directory")
    models: list[ModelGraph] = []
    skipped: list[str] = []
    for child in sorted(path.iterdir()):
        if child.suffix not in (".json", ".onnx") or not child.is_file():
            continue
        try:
            models.append(load_graph_file(child))
        except AuditError as exc:
            if not lenient:
                raise MalformedInput(f"{child}: {exc}") from exc
            skipped.append(f"{child}: {exc}")
    return make_corpus(role, models), skipped
