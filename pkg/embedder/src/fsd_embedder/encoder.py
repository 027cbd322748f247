"""Offline text-to-embedding exporter.

Reads a JSONL or CSV/TSV document file with a text field, encodes each
text with a pre-trained sentence encoder, and writes an FSDE v1 file
aligned line-for-line with the input:

    bytes 0-3   magic "FSDE"
    u32         version (1)
    u64         n (row count)
    u32         dim
    n*dim*4     IEEE-754 float32, row-major, little-endian

Rows are L2-normalized before writing, so the clustering engine's own
normalization pass is a near-no-op.
"""

from __future__ import annotations

import csv
import json
import struct
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Protocol, Sequence, Union

import numpy as np

FSDE_MAGIC = b"FSDE"
FSDE_VERSION = 1
_HEADER = struct.Struct("<4sIQI")

# per-language defaults; any sentence-transformers id may be passed instead
DEFAULT_MODELS = {
    "en": "sentence-transformers/all-mpnet-base-v2",
    "fr": "dangvantuan/sentence-camembert-large",
}

PathLike = Union[str, Path]


class ModelLoadError(Exception):
    def __init__(self, model: str, reason: str):
        super().__init__(f"cannot load model {model!r}: {reason}")


class SentenceEncoder(Protocol):
    """Anything that maps a list of texts to a (len, dim) float array."""

    def encode(self, texts: Sequence[str], batch_size: int) -> np.ndarray: ...


@dataclass(frozen=True)
class EmbedJob:
    input_path: Path
    output_path: Path
    model: str
    text_field: str = "text"
    device: Optional[str] = None
    batch_size: int = 32

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")


class EncodeSummary(NamedTuple):
    n: int
    dim: int
    seconds: float


class _SbertEncoder:
    def __init__(self, model: str, device: Optional[str]):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ModelLoadError(model, f"sentence-transformers not installed: {exc}")
        try:
            self._model = SentenceTransformer(model, device=device)
        except Exception as exc:
            raise ModelLoadError(model, str(exc))

    def encode(self, texts: Sequence[str], batch_size: int) -> np.ndarray:
        return self._model.encode(
            list(texts),
            batch_size=batch_size,
            convert_to_numpy=True,
            show_progress_bar=False,
        )


def load_model(model: str, device: Optional[str] = None) -> SentenceEncoder:
    """Resolve a sentence-transformers model identifier to an encoder."""
    return _SbertEncoder(model, device)


def read_texts(path: PathLike, text_field: str = "text") -> list[str]:
    """Read the text field of every line, in file order.

    Empty or missing texts are kept (encoded as the empty string) with a
    warning, so the output stays aligned line-for-line with the input.
    """
    path = Path(path)
    suffix = path.suffix.lower().lstrip(".")
    texts: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        if suffix in ("csv", "tsv"):
            reader = csv.DictReader(fh, delimiter="\t" if suffix == "tsv" else ",")
            records = enumerate(reader, start=2)
        else:
            records = (
                (i, json.loads(line))
                for i, line in enumerate(fh, start=1)
                if line.strip()
            )
        for line_no, record in records:
            text = record.get(text_field)
            if text is None or str(text) == "":
                warnings.warn(f"line {line_no}: empty {text_field!r}, encoding ''")
                text = ""
            texts.append(str(text))
    return texts


def write_fsde(vectors: np.ndarray, path: PathLike) -> None:
    n, dim = vectors.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FSDE_MAGIC, FSDE_VERSION, n, dim))
        fh.write(np.ascontiguousarray(vectors, dtype="<f4").tobytes())


def normalize(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors.astype(np.float64), axis=1, keepdims=True)
    norms[norms == 0] = 1.0  # empty-text embeddings may be all-zero
    return (vectors / norms).astype(np.float32)


def encode_corpus(
    job: EmbedJob, encoder: Optional[SentenceEncoder] = None
) -> EncodeSummary:
    """Encode every input line and write the FSDE file.

    ``encoder`` defaults to loading ``job.model``; pass one explicitly to
    reuse a loaded model across jobs or to substitute a custom backend.
    """
    start = time.perf_counter()
    texts = read_texts(job.input_path, job.text_field)
    if encoder is None:
        encoder = load_model(job.model, job.device)
    vectors = np.asarray(encoder.encode(texts, batch_size=job.batch_size))
    if vectors.ndim != 2 or vectors.shape[0] != len(texts):
        raise ValueError(
            f"encoder returned shape {vectors.shape} for {len(texts)} texts"
        )
    vectors = normalize(vectors)
    write_fsde(vectors, job.output_path)
    return EncodeSummary(
        n=vectors.shape[0], dim=vectors.shape[1], seconds=time.perf_counter() - start
    )
