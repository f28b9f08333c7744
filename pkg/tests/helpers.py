"""Shared test builders and independent oracles.

The oracles here deliberately avoid the library's code paths: the
protobuf encoder is written from the wire format up, the path enumerator
is a plain recursion over an adjacency dict, and the substring miners work
on exhaustive substring sets.  They exist so the implementations are
checked against a second route, not against themselves.
"""

from __future__ import annotations

import random
from itertools import combinations

from convaudit.graph import GraphNode, ModelGraph

# --- protobuf wire-format encoder -----------------------------------------


def pb_varint(value: int) -> bytes:
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def pb_len(field: int, payload: bytes) -> bytes:
    return pb_varint((field << 3) | 2) + pb_varint(len(payload)) + payload


def pb_str(field: int, text: str) -> bytes:
    return pb_len(field, text.encode("utf-8"))


def encode_node(
    op_type: str, name: str, inputs: list[str], outputs: list[str]
) -> bytes:
    msg = b""
    for value in inputs:
        msg += pb_str(1, value)
    for value in outputs:
        msg += pb_str(2, value)
    if name:
        msg += pb_str(3, name)
    msg += pb_str(4, op_type)
    return msg


def encode_model(
    graph_name: str,
    nodes: list[bytes],
    inputs: list[str],
    outputs: list[str],
    initializers: list[str] = (),
) -> bytes:
    graph = b""
    for node in nodes:
        graph += pb_len(1, node)
    if graph_name:
        graph += pb_str(2, graph_name)
    for init in initializers:
        graph += pb_len(5, pb_str(8, init))  # TensorProto carrying only a name
    for value in inputs:
        graph += pb_len(11, pb_str(1, value))
    for value in outputs:
        graph += pb_len(12, pb_str(1, value))
    return pb_len(7, graph)


def encode_graph(graph: ModelGraph) -> bytes:
    nodes = [
        encode_node(n.op_type, n.id, list(n.inputs), list(n.outputs)) for n in graph.nodes
    ]
    return encode_model(
        graph.model_id, nodes, list(graph.graph_inputs), list(graph.graph_outputs)
    )


# --- random DAG builders ---------------------------------------------------

DEFAULT_VOCAB = ("Conv", "Relu", "MaxPool", "Add", "Mul", "Gemm", "Softmax", "Concat")


def random_dag(
    rng: random.Random,
    max_nodes: int = 12,
    vocab: tuple[str, ...] = DEFAULT_VOCAB,
    model_id: str = "random",
) -> ModelGraph:
    """A random valid DAG: node i consumes only earlier values."""
    n = rng.randint(1, max_nodes)
    graph_inputs = ("x0", "x1")
    values = list(graph_inputs)
    nodes = []
    for i in range(n):
        arity = rng.choice((1, 1, 2))
        ins = tuple(rng.choice(values) for _ in range(arity))
        out = f"v{i}"
        nodes.append(GraphNode(id=f"n{i}", op_type=rng.choice(vocab), inputs=ins, outputs=(out,)))
        values.append(out)
    consumed = {v for node in nodes for v in node.inputs}
    sinks = tuple(v for v in values[2:] if v not in consumed)
    return ModelGraph(
        model_id=model_id, nodes=tuple(nodes), graph_inputs=graph_inputs, graph_outputs=sinks
    )


def chained_dag(
    rng: random.Random,
    max_nodes: int = 12,
    vocab: tuple[str, ...] = DEFAULT_VOCAB,
    model_id: str = "chained",
) -> ModelGraph:
    """Random DAG with a chain backbone: node i always consumes node i-1.

    Every node reaches every later node, so wiring any later output into
    an earlier node is guaranteed to create a cycle.
    """
    n = rng.randint(2, max_nodes)
    nodes = []
    for i in range(n):
        ins = ["x0"] if i == 0 else [f"v{i - 1}"]
        if i > 1 and rng.random() < 0.4:
            ins.append(f"v{rng.randint(0, i - 2)}")
        nodes.append(
            GraphNode(id=f"n{i}", op_type=rng.choice(vocab), inputs=tuple(ins), outputs=(f"v{i}",))
        )
    return ModelGraph(
        model_id=model_id,
        nodes=tuple(nodes),
        graph_inputs=("x0",),
        graph_outputs=(f"v{n - 1}",),
    )


# --- independent enumeration oracles ---------------------------------------


def brute_force_paths(graph: ModelGraph) -> list[tuple[str, ...]]:
    """Source-to-sink op paths by plain recursion; no sharing with the library."""
    producer = {v: n.id for n in graph.nodes for v in n.outputs}
    succ: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for node in graph.nodes:
        for value in node.inputs:
            # Consuming the same value twice is one edge, not two: paths
            # are node sequences, so parallel data edges collapse.
            if value in producer and node.id not in succ[producer[value]]:
                succ[producer[value]].append(node.id)
    preds = {nid for outs in succ.values() for nid in outs}
    ops = {n.id: n.op_type for n in graph.nodes}
    paths: list[tuple[str, ...]] = []

    def walk(nid: str, acc: list[str]) -> None:
        acc = acc + [ops[nid]]
        if not succ[nid]:
            paths.append(tuple(acc))
            return
        for nxt in succ[nid]:
            walk(nxt, acc)

    for nid in succ:
        if nid not in preds:
            walk(nid, [])
    return paths


def all_substrings(path: tuple[str, ...], min_len: int) -> set[tuple[str, ...]]:
    return {
        path[i : i + length]
        for length in range(min_len, len(path) + 1)
        for i in range(len(path) - length + 1)
    }


def brute_force_common(
    paths_x: list[tuple[str, ...]], paths_y: list[tuple[str, ...]], min_len: int
) -> set[tuple[str, ...]]:
    subs_x: set[tuple[str, ...]] = set()
    for p in paths_x:
        subs_x |= all_substrings(p, min_len)
    subs_y: set[tuple[str, ...]] = set()
    for q in paths_y:
        subs_y |= all_substrings(q, min_len)
    return subs_x & subs_y


def brute_force_reduce(seqs: set[tuple[str, ...]], min_len: int) -> set[tuple[str, ...]]:
    """Fixed-point reduction recomputed from scratch each sweep.

    Longest common runs of a pair are found by intersecting full substring
    sets, unlike the library's suffix tables.
    """
    work = set(seqs)
    while True:
        additions: set[tuple[str, ...]] = set()
        for a, b in combinations(sorted(work), 2):
            shared = all_substrings(a, 1) & all_substrings(b, 1)
            longest = max((len(s) for s in shared), default=0)
            if longest >= min_len:
                additions |= {s for s in shared if len(s) == longest}
        if additions <= work:
            break
        work |= additions
    return {
        s
        for s in work
        if not any(o != s and len(o) < len(s) and o in all_substrings(s, 1) for o in work)
    }
