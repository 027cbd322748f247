"""Mini-batch First Story Detection driver.

Each batch of b documents is searched against an immutable snapshot of
the window taken at batch start; the searches are embarrassingly parallel
and may be chunked across workers.  Assignments are then resolved
sequentially in chronological order, during which each document also
considers the already-resolved earlier documents of its own batch as
candidate neighbors before being committed to the window.  This makes the
output deterministic and independent of the worker count, and reduces to
plain one-at-a-time FSD when b = 1.
"""

from __future__ import annotations

import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Assignment, Document, EmbeddingMatrix, FsdError, FsdParams, dot_rows
from .window import WindowState


class UnsortedCorpusError(FsdError):
    def __init__(self, position: int):
        super().__init__(
            f"corpus is not chronologically sorted: timestamp decreases at index {position}"
        )


@dataclass(frozen=True)
class FsdResult:
    """Cluster ids per document (corpus order) plus run statistics."""

    labels: np.ndarray
    cluster_count: int
    elapsed: float
    distance_evals: int

    @property
    def assignments(self) -> list[Assignment]:
        return [Assignment(row, int(c)) for row, c in enumerate(self.labels)]


def _check_inputs(
    corpus: Sequence[Document], matrix: EmbeddingMatrix, params: FsdParams
) -> None:
    if len(corpus) != matrix.n:
        raise ValueError(f"corpus has {len(corpus)} documents but matrix has {matrix.n} rows")
    for i in range(1, len(corpus)):
        if corpus[i].timestamp < corpus[i - 1].timestamp:
            raise UnsortedCorpusError(i)


def _scan_chunk(
    block: np.ndarray, queries: np.ndarray, row_offset: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-query (min distance, tie-broken row) over one contiguous row chunk."""
    d = 1.0 - dot_rows(block, queries)
    # last occurrence of the minimum = largest row index in the chunk
    rev_arg = d.shape[1] - 1 - np.argmin(d[:, ::-1], axis=1)
    mins = d[np.arange(d.shape[0]), rev_arg]
    return mins, rev_arg + row_offset


def run_fsd(
    corpus: Sequence[Document], matrix: EmbeddingMatrix, params: FsdParams
) -> FsdResult:
    """Cluster a chronologically sorted corpus with mini-batch FSD.

    A document joins its nearest neighbor's cluster when the cosine
    distance is strictly below the threshold, and opens a new cluster
    otherwise (or when there are no candidates at all).  The trailing
    partial batch is processed like any other, so every document receives
    an assignment.
    """
    _check_inputs(corpus, matrix, params)
    n = matrix.n
    start = time.perf_counter()
    labels = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return FsdResult(labels, 0, time.perf_counter() - start, 0)

    data = matrix.data
    win = WindowState(params.window)
    b = params.batch
    evals = 0
    pool = ThreadPoolExecutor(params.workers) if params.workers > 1 else None
    try:
        for i in range(0, n, b):
            batch_rows = np.arange(i, min(i + b, n))
            queries = data[batch_rows]
            snap = win.snapshot()

            best_d = None
            best_row = None
            if snap:
                # committed rows are contiguous, so the snapshot is a slice
                lo, hi = snap[0][0], snap[-1][0] + 1
                evals += len(batch_rows) * (hi - lo)
                if pool is None or hi - lo < 2 * params.workers:
                    best_d, best_row = _scan_chunk(data[lo:hi], queries, lo)
                else:
                    bounds = np.linspace(lo, hi, params.workers + 1, dtype=np.int64)
                    parts = list(
                        pool.map(
                            lambda se: _scan_chunk(data[se[0] : se[1]], queries, se[0]),
                            zip(bounds[:-1], bounds[1:]),
                        )
                    )
                    best_d, best_row = parts[0]
                    for d, r in parts[1:]:
                        # chunks are in ascending row order: on a tie the
                        # later chunk (more recent document) wins
                        take = d <= best_d
                        best_d = np.where(take, d, best_d)
                        best_row = np.where(take, r, best_row)

            for k, row in enumerate(batch_rows):
                cand_d = best_d[k] if best_d is not None else None
                cand_row = int(best_row[k]) if best_row is not None else -1
                if k > 0:
                    # earlier documents of this batch, already resolved;
                    # all have larger rows than the snapshot, so ties go to them
                    d_in = 1.0 - dot_rows(queries[:k], queries[k])
                    evals += k
                    j = int(np.argmin(d_in[::-1]))
                    d_best_in = d_in[k - 1 - j]
                    if cand_d is None or d_best_in <= cand_d:
                        cand_d = d_best_in
                        cand_row = int(batch_rows[k - 1 - j])
                if cand_d is not None and cand_d < params.threshold:
                    cid = int(labels[cand_row])
                else:
                    cid = win.next_cluster
                labels[row] = cid
                win.commit(int(row), cid)
    finally:
        if pool is not None:
            pool.shutdown()

    return FsdResult(labels, win.next_cluster, time.perf_counter() - start, evals)


def run_fsd_sequential(
    corpus: Sequence[Document], matrix: EmbeddingMatrix, params: FsdParams
) -> FsdResult:
    """Straight-line one-document-at-a-time FSD (the b = 1 semantics).

    Reference implementation with no batching, no snapshots and no
    parallelism; ``run_fsd`` with b = 1 must match it exactly.  Kept for
    tests and debugging.
    """
    _check_inputs(corpus, matrix, params)
    n = matrix.n
    start = time.perf_counter()
    labels = np.full(n, -1, dtype=np.int64)
    data = matrix.data
    window: deque[int] = deque()
    next_cluster = 0
    evals = 0
    for i in range(n):
        if window:
            rows = np.asarray(window, dtype=np.int64)
            d = 1.0 - dot_rows(data[rows], data[i])
            evals += len(rows)
            dmin = d.min()
            if dmin < params.threshold:
                cid = int(labels[int(rows[d == dmin].max())])
            else:
                cid = next_cluster
                next_cluster += 1
        else:
            cid = next_cluster
            next_cluster += 1
        labels[i] = cid
        if len(window) >= params.window:
            window.popleft()
        window.append(i)
    return FsdResult(labels, next_cluster, time.perf_counter() - start, evals)


def default_window(corpus: Sequence[Document]) -> int:
    """Window size by the daily-rate rule: documents per distinct UTC day."""
    if not corpus:
        return 1
    days = len({doc.timestamp // 86400 for doc in corpus})
    return max(1, round(len(corpus) / days))
