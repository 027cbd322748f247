"""Streaming event detection: mini-batch first story detection over
dense sentence embeddings, with clustering metrics, a synthetic
planted-event harness, threshold tuning and benchmarking."""

from .core import (
    Assignment,
    DimMismatchError,
    Document,
    EmbeddingMatrix,
    EmptySetError,
    FsdError,
    FsdParams,
    ZeroVectorError,
    cosine_distance,
    nearest_in_set,
    normalize_rows,
)
from .fsd import FsdResult, UnsortedCorpusError, default_window, run_fsd, run_fsd_sequential
from .harness import SynthSpec, SweepReport, bench_batch_sizes, generate_synthetic, sweep_threshold
from .ingest import CorpusBundle, load_corpus, load_documents, load_embeddings, write_assignments, write_embeddings
from .metrics import (
    ContingencyTable,
    adjusted_mutual_information,
    adjusted_rand_index,
    build_contingency,
    evaluate,
)
from .window import WindowState

__all__ = [
    "Assignment",
    "ContingencyTable",
    "CorpusBundle",
    "DimMismatchError",
    "Document",
    "EmbeddingMatrix",
    "EmptySetError",
    "FsdError",
    "FsdParams",
    "FsdResult",
    "SweepReport",
    "SynthSpec",
    "UnsortedCorpusError",
    "WindowState",
    "ZeroVectorError",
    "adjusted_mutual_information",
    "adjusted_rand_index",
    "bench_batch_sizes",
    "build_contingency",
    "cosine_distance",
    "default_window",
    "evaluate",
    "generate_synthetic",
    "load_corpus",
    "load_documents",
    "load_embeddings",
    "nearest_in_set",
    "normalize_rows",
    "run_fsd",
    "run_fsd_sequential",
    "sweep_threshold",
    "write_assignments",
    "write_embeddings",
]

__version__ = "0.1.0"
