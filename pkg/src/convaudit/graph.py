"""Converter-neutral operator graph.

A model is reduced to its topology: named nodes carrying an operator kind,
wired by value names.  Attributes, initializer payloads and tensor shapes
are deliberately not modeled; every analysis in this package needs only
which operators appear and how they are connected.

The JSON interchange form is a single object:

    {"model_id": "...", "inputs": [...], "outputs": [...],
     "nodes": [{"id": "...", "op_type": "...", "inputs": [...], "outputs": [...]}]}

Unknown keys are rejected so that silently misspelled fields cannot pass as
empty ones.  Value names are single-assignment: each is produced by exactly
one node or enters as a graph input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    CycleDetected,
    DanglingReference,
    DuplicateId,
    MalformedInput,
)

CORPUS_ROLES = ("mismatched", "correct", "test_suite", "unlabeled")


@dataclass(frozen=True)
class GraphNode:
    id: str
    op_type: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


@dataclass(frozen=True)
class ModelGraph:
    model_id: str
    nodes: tuple[GraphNode, ...]
    graph_inputs: tuple[str, ...]
    graph_outputs: tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    role: str
    models: tuple[ModelGraph, ...]


def validate(graph: ModelGraph) -> None:
    """Check structural invariants, raising a typed error naming the culprit.

    Invariants: unique node ids, non-empty op_type, single assignment of
    value names (graph inputs included), no dangling value references, and
    acyclicity of the induced node graph.
    """
    seen_nodes: set[str] = set()
    for node in graph.nodes:
        if not node.id:
            raise MalformedInput(f"node with op_type {node.op_type!r} has an empty id")
        if not node.op_type:
            raise MalformedInput(f"node {node.id!r} has an empty op_type")
        if node.id in seen_nodes:
            raise DuplicateId(node.id, "node id")
        seen_nodes.add(node.id)

    defined: set[str] = set()
    for name in graph.graph_inputs:
        if name in defined:
            raise DuplicateId(name, "graph input")
        defined.add(name)
    producer: dict[str, str] = {}
    for node in graph.nodes:
        for value in node.outputs:
            if value in defined or value in producer:
                raise DuplicateId(value, f"value produced by node {node.id!r}")
            producer[value] = node.id

    for node in graph.nodes:
        for value in node.inputs:
            if value not in defined and value not in producer:
                raise DanglingReference(value, f"consumed by node {node.id!r}")
    seen_outputs: set[str] = set()
    for value in graph.graph_outputs:
        if value in seen_outputs:
            raise DuplicateId(value, "graph output")
        seen_outputs.add(value)
        if value not in defined and value not in producer:
            raise DanglingReference(value, "named as graph output")

    _check_acyclic(graph, producer)


def node_successors(graph: ModelGraph) -> dict[str, list[str]]:
    """Adjacency of the node graph; successor lists sorted for determinism."""
    producer = {v: n.id for n in graph.nodes for v in n.outputs}
    succ: dict[str, set[str]] = {n.id: set() for n in graph.nodes}
    for node in graph.nodes:
        for value in node.inputs:
            source = producer.get(value)
            if source is not None:
                succ[source].add(node.id)
    return {nid: sorted(out) for nid, out in succ.items()}


def _check_acyclic(graph: ModelGraph, producer: Mapping[str, str]) -> None:
    succ: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for node in graph.nodes:
        for value in node.inputs:
            source = producer.get(value)
            if source is not None:
                succ[source].append(node.id)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {nid: WHITE for nid in succ}
    for root in succ:
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        color[root] = GRAY
        while stack:
            nid, idx = stack[-1]
            if idx < len(succ[nid]):
                stack[-1] = (nid, idx + 1)
                nxt = succ[nid][idx]
                if color[nxt] == GRAY:
                    raise CycleDetected(nxt)
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, 0))
            else:
                color[nid] = BLACK
                stack.pop()


def operator_set(graph: ModelGraph) -> set[str]:
    return {node.op_type for node in graph.nodes}


_TOP_KEYS = ("model_id", "inputs", "outputs", "nodes")
_NODE_KEYS = ("id", "op_type", "inputs", "outputs")


def parse_graph_json(data: bytes | str) -> ModelGraph:
    """Parse and validate the JSON interchange form."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"not valid UTF-8: {exc}") from None
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"not valid JSON: {exc}") from None

    if not isinstance(raw, dict):
        raise MalformedInput("top level must be an object")
    _require_keys(raw, _TOP_KEYS, "top level")
    model_id = _expect_str(raw["model_id"], "model_id")
    inputs = _expect_str_list(raw["inputs"], "inputs")
    outputs = _expect_str_list(raw["outputs"], "outputs")
    if not isinstance(raw["nodes"], list):
        raise MalformedInput("'nodes' must be an array")
    nodes = []
    for i, item in enumerate(raw["nodes"]):
        if not isinstance(item, dict):
            raise MalformedInput(f"nodes[{i}] must be an object")
        _require_keys(item, _NODE_KEYS, f"nodes[{i}]")
        nodes.append(
            GraphNode(
                id=_expect_str(item["id"], f"nodes[{i}].id"),
                op_type=_expect_str(item["op_type"], f"nodes[{i}].op_type"),
                inputs=_expect_str_list(item["inputs"], f"nodes[{i}].inputs"),
                outputs=_expect_str_list(item["outputs"], f"nodes[{i}].outputs"),
            )
        )
    graph = ModelGraph(
        model_id=model_id,
        nodes=tuple(nodes),
        graph_inputs=inputs,
        graph_outputs=outputs,
    )
    validate(graph)
    return graph


def serialize_graph_json(graph: ModelGraph) -> str:
    """Canonical JSON form; parse_graph_json(serialize_graph_json(g)) == g."""
    doc = {
        "model_id": graph.model_id,
        "inputs": list(graph.graph_inputs),
        "outputs": list(graph.graph_outputs),
        "nodes": [
            {
                "id": n.id,
                "op_type": n.op_type,
                "inputs": list(n.inputs),
                "outputs": list(n.outputs),
            }
            for n in graph.nodes
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def make_corpus(role: str, models: Iterable[ModelGraph]) -> Corpus:
    if role not in CORPUS_ROLES:
        raise MalformedInput(f"unknown corpus role {role!r}")
    collected = tuple(models)
    seen: set[str] = set()
    for model in collected:
        if model.model_id in seen:
            raise DuplicateId(model.model_id, f"model id in {role} corpus")
        seen.add(model.model_id)
    return Corpus(role=role, models=collected)


def _require_keys(obj: dict, keys: tuple[str, ...], where: str) -> None:
    for key in keys:
        if key not in obj:
            raise MalformedInput(f"{where}: missing key {key!r}")
    for key in obj:
        if key not in keys:
            raise MalformedInput(f"{where}: unknown key {key!r}")


def _expect_str(value: object, where: str) -> str:
    if not isinstance(value, str):
        raise MalformedInput(f"{where} must be a string")
    return value


def _expect_str_list(value: object, where: str) -> tuple[str, ...]:
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise MalformedInput(f"{where} must be an array of strings")
    return tuple(value)
