"""File formats and corpus I/O.

Documents arrive as JSONL or CSV/TSV with ``id`` and ``timestamp``
fields; embeddings arrive in the FSDE binary format:

    bytes 0-3   magic "FSDE"
    u32         version (1)
    u64         n (row count)
    u32         dim
    n*dim*4     IEEE-754 float32, row-major, little-endian

Document/embedding pairing is positional: line i owns matrix row i.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .core import Document, EmbeddingMatrix, FsdError
from .fsd import FsdResult

FSDE_MAGIC = b"FSDE"
FSDE_VERSION = 1
_HEADER = struct.Struct("<4sIQI")

PathLike = Union[str, Path]


class ParseError(FsdError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"line {line}: {reason}")


class MissingFieldError(FsdError):
    def __init__(self, line: int, fld: str):
        self.line = line
        self.field = fld
        super().__init__(f"line {line}: missing required field '{fld}'")


class AmbiguousTimestampError(FsdError):
    def __init__(self, line: int, value: str):
        self.line = line
        super().__init__(f"line {line}: timestamp '{value}' has no UTC offset")


class BadMagicError(FsdError):
    def __init__(self, magic: bytes):
        super().__init__(f"not an FSDE file (magic {magic!r})")


class TruncatedFileError(FsdError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"truncated FSDE file: expected {expected} bytes, got {actual}")


class VersionUnsupportedError(FsdError):
    def __init__(self, version: int):
        super().__init__(f"unsupported FSDE version {version}")


@dataclass(frozen=True)
class CorpusBundle:
    """Chronological document list plus its embedding matrix."""

    documents: list[Document]
    matrix: EmbeddingMatrix

    def __post_init__(self) -> None:
        if len(self.documents) != self.matrix.n:
            raise ValueError(
                f"{len(self.documents)} documents but {self.matrix.n} embedding rows"
            )


def _parse_timestamp(value, line: int) -> int:
    if isinstance(value, bool):
        raise ParseError(line, f"bad timestamp {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not value.is_integer():
            raise ParseError(line, f"non-integer timestamp {value!r}")
        return int(value)
    text = str(value).strip()
    if not text:
        raise MissingFieldError(line, "timestamp")
    try:
        return int(text)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ParseError(line, f"bad timestamp {text!r}: {exc}") from None
    if dt.tzinfo is None:
        raise AmbiguousTimestampError(line, text)
    return int(dt.astimezone(timezone.utc).timestamp())


def _doc_from_record(record: dict, line: int, row: int) -> Document:
    for fld in ("id", "timestamp"):
        if record.get(fld) in (None, ""):
            raise MissingFieldError(line, fld)
    label = record.get("label")
    if label in (None, ""):
        label = None
    else:
        label = str(label)
    return Document(
        id=str(record["id"]),
        timestamp=_parse_timestamp(record["timestamp"], line),
        row=row,
        gold_label=label,
    )


def _infer_format(path: Path, fmt: Optional[str]) -> str:
    if fmt is not None:
        return fmt
    suffix = path.suffix.lower().lstrip(".")
    return suffix if suffix in ("jsonl", "csv", "tsv") else "jsonl"


def load_documents(path: PathLike, fmt: Optional[str] = None) -> list[Document]:
    """Load documents from JSONL or CSV/TSV (header row), in file order."""
    path = Path(path)
    fmt = _infer_format(path, fmt)
    docs: list[Document] = []
    with open(path, newline="", encoding="utf-8") as fh:
        if fmt == "jsonl":
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(line_no, f"invalid JSON: {exc}") from None
                docs.append(_doc_from_record(record, line_no, len(docs)))
        elif fmt in ("csv", "tsv"):
            reader = csv.DictReader(fh, delimiter="\t" if fmt == "tsv" else ",")
            for line_no, record in enumerate(reader, start=2):
                docs.append(_doc_from_record(record, line_no, len(docs)))
        else:
            raise ValueError(f"unknown document format {fmt!r}")
    return docs


def load_embeddings(path: PathLike) -> EmbeddingMatrix:
    """Load an FSDE file.  Rows are returned as stored, not yet normalized."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedFileError(_HEADER.size, len(raw))
    magic, version, n, dim = _HEADER.unpack_from(raw)
    if magic != FSDE_MAGIC:
        raise BadMagicError(magic)
    if version != FSDE_VERSION:
        raise VersionUnsupportedError(version)
    expected = _HEADER.size + n * dim * 4
    if len(raw) != expected:
        raise TruncatedFileError(expected, len(raw))
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(n, dim)
    return EmbeddingMatrix(np.ascontiguousarray(data))


def write_embeddings(matrix: EmbeddingMatrix, path: PathLike) -> None:
    """Write an FSDE v1 file, byte-exact round-trip with load_embeddings."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FSDE_MAGIC, FSDE_VERSION, matrix.n, matrix.dim))
        fh.write(matrix.data.astype("<f4", copy=False).tobytes())


def sort_chronologically(bundle: CorpusBundle) -> CorpusBundle:
    """Stable sort by (timestamp, file position), permuting matrix rows in lockstep."""
    order = np.argsort([d.timestamp for d in bundle.documents], kind="stable")
    docs = [
        replace(bundle.documents[int(old)], row=new) for new, old in enumerate(order)
    ]
    return CorpusBundle(docs, EmbeddingMatrix(bundle.matrix.data[order].copy()))


def load_corpus(
    docs_path: PathLike,
    embeddings_path: PathLike,
    fmt: Optional[str] = None,
    sort: bool = False,
) -> CorpusBundle:
    """Load, pair and normalize a corpus; optionally sort chronologically."""
    from .core import normalize_rows

    docs = load_documents(docs_path, fmt)
    matrix = normalize_rows(load_embeddings(embeddings_path))
    bundle = CorpusBundle(docs, matrix)
    return sort_chronologically(bundle) if sort else bundle


def write_assignments(
    result: FsdResult,
    documents: Sequence[Document],
    path: PathLike,
    fmt: str = "tsv",
) -> None:
    """Write one record per document: id, cluster_id, timestamp."""
    if len(result.labels) != len(documents):
        raise ValueError("result does not cover all documents")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "tsv":
            fh.write("id\tcluster_id\ttimestamp\n")
            for doc in documents:
                fh.write(f"{doc.id}\t{int(result.labels[doc.row])}\t{doc.timestamp}\n")
        elif fmt == "jsonl":
            for doc in documents:
                fh.write(
                    json.dumps(
                        {
                            "id": doc.id,
                            "cluster_id": int(result.labels[doc.row]),
                            "timestamp": doc.timestamp,
                        }
                    )
                    + "\n"
                )
        else:
            raise ValueError(f"unknown assignment format {fmt!r}")


def read_assignments(path: PathLike, fmt: Optional[str] = None) -> dict[str, int]:
    """Read an assignment file back as {document id: cluster id}."""
    path = Path(path)
    fmt = _infer_format(path, fmt)
    out: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        if fmt == "jsonl":
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(line_no, f"invalid JSON: {exc}") from None
                out[str(record["id"])] = int(record["cluster_id"])
        else:
            reader = csv.DictReader(fh, delimiter="\t")
            for record in reader:
                out[str(record["id"])] = int(record["cluster_id"])
    return out
