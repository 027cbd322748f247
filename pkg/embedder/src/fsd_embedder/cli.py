"""CLI for the text-to-embedding exporter."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .encoder import DEFAULT_MODELS, EmbedJob, ModelLoadError, encode_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsd-embed",
        description="Encode a document file into an FSDE embedding file.",
    )
    parser.add_argument("--input", required=True, help="jsonl/csv/tsv document file")
    parser.add_argument("--text-field", default="text")
    parser.add_argument(
        "--model",
        help="sentence-transformers model id (default: per --language)",
    )
    parser.add_argument("--language", choices=sorted(DEFAULT_MODELS), default="en")
    parser.add_argument("--out", required=True, help="FSDE output path")
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--device", help="device hint, e.g. cpu or cuda")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    job = EmbedJob(
        input_path=Path(args.input),
        output_path=Path(args.out),
        model=args.model or DEFAULT_MODELS[args.language],
        text_field=args.text_field,
        device=args.device,
        batch_size=args.batch_size,
    )
    try:
        summary = encode_corpus(job)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ModelLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    print(f"n={summary.n}", file=sys.stderr)
    print(f"dim={summary.dim}", file=sys.stderr)
    print(f"seconds={summary.seconds:.2f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
