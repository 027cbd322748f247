"""Command-line entry point: cluster, eval, sweep, bench and synth.

Machine-readable results go to --out or stdout; diagnostics go to stderr
as key=value lines.  Exit codes: 2 argument errors, 3 ingest errors, 4
runtime errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import ExitStack
from typing import Optional, Sequence

from .core import FsdError, FsdParams
from .fsd import UnsortedCorpusError, default_window, run_fsd
from .harness import (
    SynthSpec,
    bench_batch_sizes,
    generate_synthetic,
    sweep_threshold,
    write_bench_csv,
    write_sweep_csv,
)
from .ingest import (
    AmbiguousTimestampError,
    BadMagicError,
    MissingFieldError,
    ParseError,
    TruncatedFileError,
    VersionUnsupportedError,
    load_corpus,
    read_assignments,
    write_assignments,
    write_embeddings,
)
from .metrics import build_contingency, adjusted_mutual_information, adjusted_rand_index

EXIT_ARGS = 2
EXIT_INGEST = 3
EXIT_RUNTIME = 4

_INGEST_ERRORS = (
    ParseError,
    MissingFieldError,
    AmbiguousTimestampError,
    BadMagicError,
    TruncatedFileError,
    VersionUnsupportedError,
    UnsortedCorpusError,
    FileNotFoundError,
    OSError,
)


def _default_workers() -> int:
    env = os.environ.get("FSD_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--docs", required=True, help="document file (jsonl/csv/tsv)")
    p.add_argument("--embeddings", required=True, help="FSDE embedding file")
    p.add_argument("--sort", action="store_true", help="sort chronologically at load")


def _add_fsd_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", type=int, help="window size (default: docs-per-day rule)")
    p.add_argument("--batch", type=int, default=8)
    p.add_argument("--workers", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsd", description="Mini-batch first story detection over embeddings."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a corpus, write assignments")
    _add_corpus_args(p)
    p.add_argument("--threshold", type=float, required=True)
    _add_fsd_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")

    p = sub.add_parser("eval", help="score an assignment file against gold labels")
    p.add_argument("--pred", required=True, help="assignment file from cluster")
    p.add_argument("--gold-docs", required=True, help="document file with labels")

    p = sub.add_parser("sweep", help="grid-search the distance threshold")
    _add_corpus_args(p)
    _add_fsd_args(p)
    p.add_argument("--t-min", type=float, default=0.10)
    p.add_argument("--t-max", type=float, default=0.90)
    p.add_argument("--t-step", type=float, default=0.05)
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = sub.add_parser("bench", help="time FSD runs across batch sizes")
    _add_corpus_args(p)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--window", type=int)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--batch-sizes", default="1,2,4,8,16,32")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = sub.add_parser("synth", help="generate a planted-event corpus")
    p.add_argument("--events", type=int, default=50)
    p.add_argument("--docs-per-event", type=int, default=100)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--noise-sigma", type=float, default=0.05)
    p.add_argument("--duration", type=int, default=3600, help="event duration (s)")
    p.add_argument("--span", type=int, default=7 * 86400, help="corpus span (s)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-docs", required=True)
    p.add_argument("--out-embeddings", required=True)

    return parser


def _resolve_params(args, n_docs, documents) -> FsdParams:
    window = args.window if args.window is not None else default_window(documents)
    workers = args.workers if args.workers is not None else _default_workers()
    return FsdParams(
        threshold=args.threshold, window=window, batch=args.batch, workers=workers
    )


def _cmd_cluster(args) -> int:
    bundle = load_corpus(args.docs, args.embeddings, sort=args.sort)
    params = _resolve_params(args, len(bundle.documents), bundle.documents)
    result = run_fsd(bundle.documents, bundle.matrix, params)
    write_assignments(result, bundle.documents, args.out, fmt=args.format)
    for key, value in (
        ("n", len(bundle.documents)),
        ("cluster_count", result.cluster_count),
        ("window", params.window),
        ("batch", params.batch),
        ("workers", params.workers),
        ("elapsed_s", f"{result.elapsed:.3f}"),
        ("distance_evals", result.distance_evals),
    ):
        print(f"{key}={value}", file=sys.stderr)
    return 0


def _cmd_eval(args) -> int:
    from .ingest import load_documents

    pred = read_assignments(args.pred)
    documents = load_documents(args.gold_docs)
    gold_docs = [d for d in documents if d.gold_label is not None]
    missing = [d.id for d in gold_docs if d.id not in pred]
    if missing:
        print(
            f"error: prediction file missing {len(missing)} document ids "
            f"(first: {missing[0]})",
            file=sys.stderr,
        )
        return EXIT_INGEST
    table = build_contingency(
        [pred[d.id] for d in gold_docs], [d.gold_label for d in gold_docs]
    )
    print(f"ARI={adjusted_rand_index(table):.4f}")
    print(f"AMI={adjusted_mutual_information(table):.4f}")
    print(f"N={table.total_n}")
    return 0


def _cmd_sweep(args) -> int:
    bundle = load_corpus(args.docs, args.embeddings, sort=args.sort)
    window = args.window if args.window is not None else default_window(bundle.documents)
    workers = args.workers if args.workers is not None else _default_workers()
    report = sweep_threshold(
        bundle,
        window=window,
        batch=args.batch,
        workers=workers,
        t_min=args.t_min,
        t_max=args.t_max,
        t_step=args.t_step,
    )
    with ExitStack() as stack:
        out = stack.enter_context(open(args.out, "w", newline="")) if args.out else sys.stdout
        write_sweep_csv(report, out)
    print(f"best_threshold={report.best_threshold}", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    bundle = load_corpus(args.docs, args.embeddings, sort=args.sort)
    window = args.window if args.window is not None else default_window(bundle.documents)
    workers = args.workers if args.workers is not None else _default_workers()
    try:
        batch_sizes = [int(b) for b in args.batch_sizes.split(",") if b.strip()]
    except ValueError:
        print(f"error: bad --batch-sizes {args.batch_sizes!r}", file=sys.stderr)
        return EXIT_ARGS
    rows = bench_batch_sizes(
        bundle, threshold=args.threshold, window=window,
        batch_sizes=batch_sizes, workers=workers,
    )
    with ExitStack() as stack:
        out = stack.enter_context(open(args.out, "w", newline="")) if args.out else sys.stdout
        write_bench_csv(rows, out)
    return 0


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        n_events=args.events,
        docs_per_event=args.docs_per_event,
        dim=args.dim,
        noise_sigma=args.noise_sigma,
        event_duration_s=args.duration,
        corpus_span_s=args.span,
        seed=args.seed,
    )
    bundle = generate_synthetic(spec)
    import json

    with open(args.out_docs, "w", encoding="utf-8") as fh:
        for doc in bundle.documents:
            fh.write(
                json.dumps(
                    {"id": doc.id, "timestamp": doc.timestamp, "label": doc.gold_label}
                )
                + "\n"
            )
    write_embeddings(bundle.matrix, args.out_embeddings)
    print(f"n={len(bundle.documents)}", file=sys.stderr)
    print(f"dim={bundle.matrix.dim}", file=sys.stderr)
    return 0


_COMMANDS = {
    "cluster": _cmd_cluster,
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "bench": _cmd_bench,
    "synth": _cmd_synth,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ARGS
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except _INGEST_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except FsdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
