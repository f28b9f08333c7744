"""Random synthetic model generation.

A generated model is a random DAG of operator nodes drawn from a configurable
vocabulary.  Every operator is realized as a shape-preserving computation on
4x4 float32 tensors, so any wiring the generator draws is a valid, executable
model; there is no constraint solving.  The topology is emitted both as a
framework (torch) module and as a JSON graph document, so downstream analysis
never needs the framework installed.

Determinism contract: the (seed, node_count, vocabulary) triple fully
determines the drawn topology, including any internal retries.  Regenerating
with the values recorded in a corpus index reproduces the model exactly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
import torch

from .errors import GenerationFailure

TENSOR_SHAPE = (4, 4)

# Operator kinds and their arities.  The vocabulary is a documented config,
# not a claim about any particular converter's operator coverage.
OP_ARITY: dict[str, int] = {
    "add": 2,
    "mul": 2,
    "matmul": 2,
    "concat": 2,
    "relu": 1,
    "sigmoid": 1,
    "softmax": 1,
    "slice": 1,
    "transpose": 1,
    "reshape": 1,
    "pad": 1,
    "reduce_max": 1,
}

DEFAULT_VOCABULARY: tuple[str, ...] = tuple(sorted(OP_ARITY))

# Default node-count sweep for family generation.  Explicit config, not a
# reproduction of anyone's experiment bounds.
DEFAULT_NODE_COUNTS: tuple[int, ...] = tuple(range(10, 101, 10))


# Every realizer maps 4x4 f32 operands to a 4x4 f32 result, which is what
# makes arbitrary wiring type-check.  Ops that naturally change shape (concat,
# slice, pad, reduce_max, reshape) are composites that restore the shape while
# still exercising the underlying operator kind in the exported graph.
def _concat(a, b):
    # columns 2..3 of a followed by columns 0..1 of b
    return torch.cat((a, b), dim=1).narrow(1, 2, 4)


def _slice(a):
    # first 3 rows, zero row appended
    return torch.nn.functional.pad(a.narrow(0, 0, 3), (0, 0, 0, 1))


def _pad(a):
    # zero column prepended, last column trimmed
    return torch.nn.functional.pad(a, (1, 0)).narrow(1, 0, 4)


def _reshape(a):
    return a.reshape(2, 8).reshape(TENSOR_SHAPE)


def _reduce_max(a):
    return a.max(dim=1, keepdim=True).values.expand(TENSOR_SHAPE)


_TORCH_OPS = {
    "add": torch.add,
    "mul": torch.mul,
    "matmul": torch.matmul,
    "concat": _concat,
    "relu": torch.relu,
    "sigmoid": torch.sigmoid,
    "softmax": lambda a: torch.softmax(a, dim=1),
    "slice": _slice,
    "transpose": lambda a: a.transpose(0, 1),
    "reshape": _reshape,
    "pad": _pad,
    "reduce_max": _reduce_max,
}


def _tf_ops(tf):
    """Same vocabulary realized in tensorflow; built lazily, tf is optional."""
    return {
        "add": tf.add,
        "mul": tf.multiply,
        "matmul": tf.linalg.matmul,
        "concat": lambda a, b: tf.concat((a, b), axis=1)[:, 2:6],
        "relu": tf.nn.relu,
        "sigmoid": tf.sigmoid,
        "softmax": lambda a: tf.nn.softmax(a, axis=1),
        "slice": lambda a: tf.pad(a[:3, :], ((0, 1), (0, 0))),
        "transpose": tf.transpose,
        "reshape": lambda a: tf.reshape(tf.reshape(a, (2, 8)), TENSOR_SHAPE),
        "pad": lambda a: tf.pad(a, ((0, 0), (1, 0)))[:, :4],
        "reduce_max": lambda a: tf.repeat(
            tf.reduce_max(a, axis=1, keepdims=True), TENSOR_SHAPE[1], axis=1
        ),
    }


@dataclass(frozen=True)
class GenerationSpec:
    """Parameters of one generation draw (or of a whole family).

    ``min_distinct`` and the always-on vocabulary-coverage requirement are the
    family conditions: a family for one node count keeps growing until every
    vocabulary op appears somewhere in it and it holds at least
    ``min_distinct`` topologically distinct models.
    """

    node_count: int
    seed: int
    op_vocabulary: tuple[str, ...] = DEFAULT_VOCABULARY
    dtype: str = "f32"
    min_distinct: int = 3
    retry_budget: int = 20

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError(f"node_count must be >= 1, got {self.node_count}")
        vocab = tuple(sorted(dict.fromkeys(self.op_vocabulary)))
        if not vocab:
            raise ValueError("op_vocabulary must be non-empty")
        unknown = [op for op in vocab if op not in OP_ARITY]
        if unknown:
            raise ValueError(f"unknown operator kinds: {', '.join(unknown)}")
        object.__setattr__(self, "op_vocabulary", vocab)
        if self.dtype != "f32":
            raise ValueError(f"generation is f32-only, got dtype {self.dtype!r}")
        if self.min_distinct < 1:
            raise ValueError(f"min_distinct must be >= 1, got {self.min_distinct}")
        if self.retry_budget < 1:
            raise ValueError(f"retry_budget must be >= 1, got {self.retry_budget}")


class TorchProgram(torch.nn.Module):
    """Parameter-free torch realization of a generated node program."""

    def __init__(self, ops, returns):
        super().__init__()
        self._program = tuple(ops)
        self._returns = tuple(returns)

    def forward(self, x):
        env = {"x": x}
        for i, (op, sources) in enumerate(self._program):
            env[f"v{i}"] = _TORCH_OPS[op](*(env[s] for s in sources))
        result = tuple(env[name] for name in self._returns)
        return result[0] if len(result) == 1 else result


@dataclass(frozen=True)
class GeneratedModel:
    """A drawn topology plus accessors for its framework realizations.

    ``ops[i]`` is ``(op_kind, source_values)`` for node ``i``; node ``i``
    produces value ``v{i}``.  The single graph input is named ``x``.
    """

    model_id: str
    seed: int
    node_count: int
    ops: tuple[tuple[str, tuple[str, ...]], ...]
    graph_outputs: tuple[str, ...] = field(repr=False)

    def graph_doc(self) -> dict:
        return {
            "model_id": self.model_id,
            "inputs": ["x"],
            "outputs": list(self.graph_outputs),
            "nodes": [
                {
                    "id": f"n{i}",
                    "op_type": op,
                    "inputs": list(sources),
                    "outputs": [f"v{i}"],
                }
                for i, (op, sources) in enumerate(self.ops)
            ],
        }

    def graph_json(self) -> str:
        return json.dumps(self.graph_doc(), indent=2) + "\n"

    def torch_module(self) -> TorchProgram:
        return TorchProgram(self.ops, self.graph_outputs)

    def tf_callable(self):
        """Python function over tf tensors; wrap in tf.function to export."""
        import tensorflow as tf  # deferred: only the tf lane needs it

        ops_table = _tf_ops(tf)
        program, returns = self.ops, self.graph_outputs

        def run(x):
            env = {"x": x}
            for i, (op, sources) in enumerate(program):
                env[f"v{i}"] = ops_table[op](*(env[s] for s in sources))
            result = tuple(env[name] for name in returns)
            return result[0] if len(result) == 1 else result

        return run


def _draw(rng: random.Random, node_count: int, vocab: tuple[str, ...]):
    values = ["x"]
    ops = []
    for i in range(node_count):
        op = rng.choice(vocab)
        sources = tuple(rng.choice(values) for _ in range(OP_ARITY[op]))
        ops.append((op, sources))
        values.append(f"v{i}")
    return tuple(ops)


def _outputs_of(ops) -> tuple[str, ...]:
    consumed = {s for _, sources in ops for s in sources}
    return tuple(f"v{i}" for i in range(len(ops)) if f"v{i}" not in consumed)


def generate_model(spec: GenerationSpec) -> GeneratedModel:
    """Draw one random model; deterministic given the spec.

    Draws are valid by construction (fixed-shape realizers), so the probe run
    and retry loop are a safety net, not a search: a draw is rejected only if
    its torch realization fails to execute or yields a non-f32 output.
    """
    rng = random.Random(spec.seed)
    model_id = f"gen-n{spec.node_count:03d}-s{spec.seed}"
    probe = torch.from_numpy(
        np.random.default_rng(spec.seed).standard_normal(TENSOR_SHAPE, dtype=np.float32)
    )
    last_error = "no attempt made"
    for _ in range(spec.retry_budget):
        ops = _draw(rng, spec.node_count, spec.op_vocabulary)
        model = GeneratedModel(
            model_id=model_id,
            seed=spec.seed,
            node_count=spec.node_count,
            ops=ops,
            graph_outputs=_outputs_of(ops),
        )
        try:
            outs = model.torch_module()(probe)
        except Exception as exc:
            last_error = f"probe execution failed: {exc}"
            continue
        outs = outs if isinstance(outs, tuple) else (outs,)
        if all(o.dtype == torch.float32 and tuple(o.shape) == TENSOR_SHAPE for o in outs):
            return model
        last_error = "probe produced a non-f32 or reshaped output"
    raise GenerationFailure(
        spec.seed,
        f"seed {spec.seed}: no valid model in {spec.retry_budget} attempts ({last_error})",
    )


def generate_family(
    node_counts: Iterable[int] | None,
    template: GenerationSpec,
    out_dir: str | Path,
) -> dict:
    """Generate a corpus on disk; returns the index document.

    Per node count, keeps drawing (attempt seeds ``template.seed + k``) until
    the family conditions hold, then moves on.  Layout under ``out_dir``:
    ``models/<model_id>.json`` per model plus ``index.json``.
    """
    counts = DEFAULT_NODE_COUNTS if node_counts is None else tuple(node_counts)
    out_dir = Path(out_dir)
    (out_dir / "models").mkdir(parents=True, exist_ok=True)

    vocab = template.op_vocabulary
    budget = 100 + 50 * max(template.min_distinct, len(vocab))
    entries = []
    for count in counts:
        kept: dict[tuple, GeneratedModel] = {}
        ops_seen: set[str] = set()
        for attempt in range(budget):
            spec = GenerationSpec(
                node_count=count,
                seed=template.seed + attempt,
                op_vocabulary=vocab,
                min_distinct=template.min_distinct,
                retry_budget=template.retry_budget,
            )
            model = generate_model(spec)
            if model.ops not in kept:
                kept[model.ops] = model
                ops_seen.update(op for op, _ in model.ops)
            if len(kept) >= template.min_distinct and ops_seen >= set(vocab):
                break
        else:
            missing = sorted(set(vocab) - ops_seen)
            raise GenerationFailure(
                template.seed,
                f"node count {count}: family conditions unmet after {budget} attempts "
                f"(distinct={len(kept)}, required={template.min_distinct}, "
                f"missing ops={missing})",
            )
        for model in kept.values():
            rel = f"models/{model.model_id}.json"
            (out_dir / rel).write_text(model.graph_json(), encoding="utf-8")
            entries.append(
                {
                    "model_id": model.model_id,
                    "node_count": model.node_count,
                    "seed": model.seed,
                    "path": rel,
                }
            )

    entries.sort(key=lambda e: e["model_id"])
    index = {
        "dtype": "f32",
        "input_shape": list(TENSOR_SHAPE),
        "vocabulary": list(vocab),
        "models": entries,
    }
    (out_dir / "index.json").write_text(json.dumps(index, indent=2) + "\n", encoding="utf-8")
    return index
