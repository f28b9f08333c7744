"""Command line front end: ``harness generate`` and ``harness run``.

Exit codes: 0 on success (pipeline failures are data, recorded in the
manifest, not exit codes), 1 when generation gives up within its budget,
2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import HarnessError
from .generator import DEFAULT_VOCABULARY, GenerationSpec, generate_family
from .pipeline import run_campaign


def _cmd_generate(args: argparse.Namespace) -> int:
    try:
        spec = GenerationSpec(
            node_count=args.nodes,
            seed=args.seed,
            op_vocabulary=tuple(args.vocab) if args.vocab else DEFAULT_VOCABULARY,
            min_distinct=args.count,
        )
    except ValueError as exc:
        print(f"harness: {exc}", file=sys.stderr)
        return 2
    index = generate_family([args.nodes], spec, args.out)
    print(f"node count {args.nodes}: {len(index['models'])} models")
    print(f"index: {Path(args.out) / 'index.json'}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    records, manifest = run_campaign(
        args.models, args.converter, input_count=args.inputs, out_dir=Path(args.out)
    )
    for record in records:
        print(f"{record['model_id']}: {record['stage_reached']}")
    print(f"manifest: {manifest}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="harness",
        description="generate synthetic models and drive converter pipelines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a model family onto disk")
    g.add_argument("--nodes", type=int, required=True, metavar="N", help="operator nodes per model")
    g.add_argument("--seed", type=int, required=True, metavar="S")
    g.add_argument("--count", type=int, required=True, metavar="C", help="minimum distinct models")
    g.add_argument("--out", required=True, metavar="DIR")
    g.add_argument(
        "--vocab",
        nargs="+",
        metavar="OP",
        default=None,
        help=f"operator kinds to draw from (default: all {len(DEFAULT_VOCABULARY)})",
    )

    r = sub.add_parser("run", help="run a generated family through a converter pipeline")
    r.add_argument("--models", required=True, metavar="DIR", help="directory written by generate")
    r.add_argument("--converter", choices=sorted(("torch", "tf")), required=True)
    r.add_argument("--inputs", type=int, default=100, metavar="N", help="random inputs per model")
    r.add_argument("--out", required=True, metavar="DIR")

    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        return _cmd_run(args)
    except HarnessError as exc:
        print(f"harness: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"harness: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
