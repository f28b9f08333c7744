"""Synthetic model generation and conversion-pipeline harness.

Generates random DAG models over a fixed operator vocabulary, runs them
through real converters in isolated subprocesses, and emits the artifacts the
analysis side consumes: JSON graph documents, tensor dump files, and
JSON-Lines conversion manifests.
"""

from .dumps import dump_bytes, dump_tensor
from .errors import GenerationFailure, HarnessError, UnsupportedDtype
from .generator import (
    DEFAULT_NODE_COUNTS,
    DEFAULT_VOCABULARY,
    OP_ARITY,
    TENSOR_SHAPE,
    GeneratedModel,
    GenerationSpec,
    generate_family,
    generate_model,
)
from .pipeline import CONVERTER_IDS, make_inputs, run_campaign, run_pipeline

__all__ = [
    "CONVERTER_IDS",
    "DEFAULT_NODE_COUNTS",
    "DEFAULT_VOCABULARY",
    "GeneratedModel",
    "GenerationFailure",
    "GenerationSpec",
    "HarnessError",
    "OP_ARITY",
    "TENSOR_SHAPE",
    "UnsupportedDtype",
    "dump_bytes",
    "dump_tensor",
    "generate_family",
    "generate_model",
    "make_inputs",
    "run_campaign",
    "run_pipeline",
]
