"""Shared domain types and the vector math that dominates runtime.

All distances are cosine distances over unit-normalized vectors, computed
as ``1 - dot(u, v)``.  Every dot product in the package goes through
:func:`dot_rows` / :func:`dot_pair`, which fix a single summation order:
results are bit-identical no matter how candidate rows are chunked across
workers or how many queries are batched together.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class FsdError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVectorError(FsdError):
    """A row with (near-)zero norm cannot be normalized."""

    def __init__(self, rows: Sequence[int]):
        self.rows = list(rows)
        super().__init__(f"zero-norm embedding rows: {self.rows}")


class DimMismatchError(FsdError):
    def __init__(self, dim_u: int, dim_v: int):
        super().__init__(f"dimensionality mismatch: {dim_u} vs {dim_v}")


class EmptySetError(FsdError):
    def __init__(self) -> None:
        super().__init__("nearest_in_set called with an empty candidate set")


@dataclass(frozen=True)
class Document:
    """One timestamped item in the stream.

    ``row`` indexes into the corpus :class:`EmbeddingMatrix`; ``gold_label``
    is the annotated event id when available, used only for evaluation.
    """

    id: str
    timestamp: int
    row: int
    gold_label: Optional[str] = None


@dataclass(frozen=True)
class EmbeddingMatrix:
    """n x dim dense float32 matrix; row i belongs to document i."""

    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.ndim != 2:
            raise ValueError("embedding data must be 2-D")
        if self.data.dtype != np.float32:
            object.__setattr__(self, "data", self.data.astype(np.float32))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class FsdParams:
    """Parameters of one clustering run: threshold t, window w, batch b."""

    threshold: float
    window: int
    batch: int = 8
    workers: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.threshold <= 2.0:
            raise ValueError(f"threshold must be in (0, 2], got {self.threshold}")
        if self.window < 1:
            raise ValueError(f"window must be positive, got {self.window}")
        if self.batch < 1:
            raise ValueError(f"batch must be positive, got {self.batch}")
        if self.batch > self.window:
            raise ValueError(
                f"batch ({self.batch}) must not exceed window ({self.window})"
            )
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")


@dataclass(frozen=True)
class Assignment:
    doc_row: int
    cluster_id: int


def normalize_rows(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Return a copy of ``matrix`` with every row scaled to unit norm.

    Raises :class:`ZeroVectorError` listing all rows whose norm is below
    1e-12 (corrupt or missing embeddings).
    """
    data = matrix.data.astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", data, data))
    bad = np.nonzero(norms < 1e-12)[0]
    if bad.size:
        raise ZeroVectorError(bad.tolist())
    return EmbeddingMatrix((data / norms[:, None]).astype(np.float32))


def dot_pair(u: np.ndarray, v: np.ndarray) -> float:
    """Canonical dot product of two vectors (fixed summation order)."""
    return float(np.einsum("j,j->", u, v))


def dot_rows(block: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Canonical dot products of one or more queries against a row block.

    ``block`` is (m, dim); ``queries`` is (dim,) or (k, dim).  Returns (m,)
    or (k, m).  Row results are bit-identical to :func:`dot_pair` on the
    same operands, regardless of m or k.
    """
    if queries.ndim == 1:
        return np.einsum("ij,j->i", block, queries)
    return np.einsum("ij,kj->ki", block, queries)


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - dot(u, v); in [0, 2] for unit vectors.

    The subtraction is done in float32, matching the batched distance
    kernels bit for bit.
    """
    if u.shape[-1] != v.shape[-1]:
        raise DimMismatchError(u.shape[-1], v.shape[-1])
    return float(np.float32(1.0) - np.einsum("j,j->", u, v))


def nearest_in_set(
    query: np.ndarray, rows: Sequence[int], matrix: EmbeddingMatrix
) -> tuple[int, float]:
    """Nearest neighbor of ``query`` among ``matrix`` rows ``rows``.

    Returns ``(row, distance)`` minimizing cosine distance.  Ties are
    broken by the largest row index, i.e. the most recent document wins.
    """
    if len(rows) == 0:
        raise EmptySetError()
    rows_arr = np.asarray(rows, dtype=np.int64)
    d = 1.0 - dot_rows(matrix.data[rows_arr], query)
    dmin = d.min()
    best_row = int(rows_arr[d == dmin].max())
    return best_row, float(dmin)
