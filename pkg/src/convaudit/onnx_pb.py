"""Topology reader for serialized ONNX models.

Decodes just enough of the protobuf wire format to recover the operator
graph: node names, operator kinds and value wiring.  Attributes, tensor
payloads, shapes, opset imports and docs are skipped field-by-field, which
makes the reader opset-version-agnostic.  Subgraphs carried inside node
attributes (control-flow bodies) are part of the skipped attributes and are
not surfaced.

Field numbers used (stable across every published schema revision):

    ModelProto.graph        = 7
    GraphProto.node         = 1     NodeProto.input   = 1
    GraphProto.name         = 2     NodeProto.output  = 2
    GraphProto.initializer  = 5     NodeProto.name    = 3
    GraphProto.input        = 11    NodeProto.op_type = 4
    GraphProto.output       = 12
    GraphProto.sparse_initializer = 15
    ValueInfoProto.name     = 1
    TensorProto.name        = 8
    SparseTensorProto.values = 1

Initializer names are appended to the graph inputs: an initializer is a
value source exactly like an input, and models that list weights only as
initializers must still validate.
"""

from __future__ import annotations

from .errors import MalformedInput
from .graph import GraphNode, ModelGraph, validate

_VARINT, _FIXED64, _LEN, _SGROUP, _EGROUP, _FIXED32 = 0, 1, 2, 3, 4, 5


def _read_varint(buf: bytes, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise MalformedInput("truncated varint")
        byte = buf[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7
        if shift > 63:
            raise MalformedInput("varint longer than 10 bytes")


def _fields(buf: bytes):
    """Yield (field_number, wire_type, payload) for one message buffer.

    payload is an int for varint/fixed fields and bytes for
    length-delimited ones.
    """
    pos = 0
    while pos < len(buf):
        tag, pos = _read_varint(buf, pos)
        field, wire = tag >> 3, tag & 0x7
        if field == 0:
            raise MalformedInput("field number 0")
        if wire == _VARINT:
            value, pos = _read_varint(buf, pos)
        elif wire == _LEN:
            size, pos = _read_varint(buf, pos)
            if pos + size > len(buf):
                raise MalformedInput(f"truncated field {field}")
            value = buf[pos : pos + size]
            pos += size
        elif wire == _FIXED64:
            if pos + 8 > len(buf):
                raise MalformedInput(f"truncated field {field}")
            value = int.from_bytes(buf[pos : pos + 8], "little")
            pos += 8
        elif wire == _FIXED32:
            if pos + 4 > len(buf):
                raise MalformedInput(f"truncated field {field}")
            value = int.from_bytes(buf[pos : pos + 4], "little")
            pos += 4
        elif wire in (_SGROUP, _EGROUP):
            raise MalformedInput(f"deprecated group encoding on field {field}")
        else:
            raise MalformedInput(f"unknown wire type {wire}")
        yield field, wire, value


def _expect_len(field: int, wire: int, value: object, what: str) -> bytes:
    if wire != _LEN or not isinstance(value, bytes):
        raise MalformedInput(f"{what} (field {field}) is not length-delimited")
    return value


def _decode_str(raw: bytes, what: str) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedInput(f"{what} is not valid UTF-8: {exc}") from None


def _value_info_name(buf: bytes, what: str) -> str:
    name = ""
    for field, wire, value in _fields(buf):
        if field == 1:
            name = _decode_str(_expect_len(field, wire, value, what), what)
    return name


def _tensor_name(buf: bytes) -> str:
    name = ""
    for field, wire, value in _fields(buf):
        if field == 8:
            name = _decode_str(
                _expect_len(field, wire, value, "initializer name"), "initializer name"
            )
    return name


def _sparse_tensor_name(buf: bytes) -> str:
    for field, wire, value in _fields(buf):
        if field == 1:
            return _tensor_name(_expect_len(field, wire, value, "sparse initializer"))
    return ""


def _parse_node(buf: bytes, index: int) -> GraphNode:
    inputs: list[str] = []
    outputs: list[str] = []
    name = ""
    op_type = ""
    for field, wire, value in _fields(buf):
        if field == 1:
            inputs.append(_decode_str(_expect_len(field, wire, value, "node input"), "node input"))
        elif field == 2:
            outputs.append(
                _decode_str(_expect_len(field, wire, value, "node output"), "node output")
            )
        elif field == 3:
            name = _decode_str(_expect_len(field, wire, value, "node name"), "node name")
        elif field == 4:
            op_type = _decode_str(_expect_len(field, wire, value, "node op_type"), "node op_type")
    # Empty strings mark unused optional slots and carry no wiring.
    return GraphNode(
        id=name or f"node_{index}",
        op_type=op_type,
        inputs=tuple(v for v in inputs if v),
        outputs=tuple(v for v in outputs if v),
    )


def parse_onnx_protobuf(data: bytes) -> ModelGraph:
    """Parse serialized model bytes into a validated ModelGraph.

    The model id is the embedded graph name (may be empty; directory
    loaders substitute the file stem in that case).
    """
    graph_buf = b""
    for field, wire, value in _fields(data):
        if field == 7:
            # Repeated occurrences of a message field concatenate.
            graph_buf += _expect_len(field, wire, value, "graph")

    name = ""
    nodes: list[GraphNode] = []
    inputs: list[str] = []
    initializers: list[str] = []
    outputs: list[str] = []
    for field, wire, value in _fields(graph_buf):
        if field == 1:
            nodes.append(_parse_node(_expect_len(field, wire, value, "node"), len(nodes)))
        elif field == 2:
            name = _decode_str(_expect_len(field, wire, value, "graph name"), "graph name")
        elif field == 5:
            initializers.append(_tensor_name(_expect_len(field, wire, value, "initializer")))
        elif field == 11:
            inputs.append(_value_info_name(_expect_len(field, wire, value, "graph input"), "graph input"))
        elif field == 12:
            outputs.append(_value_info_name(_expect_len(field, wire, value, "graph output"), "graph output"))
        elif field == 15:
            initializers.append(_sparse_tensor_name(_expect_len(field, wire, value, "sparse initializer")))

    graph_inputs = [v for v in inputs if v]
    for init in initializers:
        if init and init not in graph_inputs:
            graph_inputs.append(init)

    graph = ModelGraph(
        model_id=name,
        nodes=tuple(nodes),
        graph_inputs=tuple(graph_inputs),
        graph_outputs=tuple(v for v in outputs if v),
    )
    validate(graph)
    return graph
