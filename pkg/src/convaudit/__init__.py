"""Differential auditing toolkit for ONNX model converters.

Submodules:

    graph       converter-neutral operator graphs, JSON interchange, corpora
    onnx_pb     topology reader for serialized models
    tensors     tensor values and the binary dump format
    difftest    outcome classification and summary tables
    opsets      operator-set analysis (H1)
    sequences   operator-sequence mining and reduction (H2)
    taxonomy    failure-report tabulation
    cli         the convaudit command
"""

from .difftest import (
    BEHAVIOURAL_DIFFERENCE,
    CATEGORY_ORDER,
    SUCCESS,
    UNSUCCESSFUL_CONVERSION,
    UNSUCCESSFUL_LOAD,
    WRAPPER_ERROR,
    ConversionRecord,
    Incomparable,
    TolerancePolicy,
    Verdict,
    classify_record,
    compare_outputs,
    load_manifest,
    max_abs_diff,
    summarize,
)
from .graph import Corpus, GraphNode, ModelGraph, make_corpus, operator_set, parse_graph_json, serialize_graph_json, validate
from .onnx_pb import parse_onnx_protobuf
from .opsets import HypothesisVerdict, OpSetReport, collect_ops, evaluate_h1, op_set_report
from .sequences import (
    H2Thresholds,
    PathBudget,
    SeqSet,
    common_sequences,
    evaluate_h2,
    reduce_sequences,
    seq_difference,
    sequence_report,
    shared_between,
    shared_within,
    simple_paths,
    support,
)
from .tensors import Tensor, make_tensor, parse_tensor_dump, read_tensor_dump, tensor_dump_bytes, write_tensor_dump

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
