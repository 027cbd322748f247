"""Synthetic planted-event corpora, threshold grid-search and the
batch-size timing benchmark.

The generator draws one unit center per event uniformly on the sphere and
perturbs each document with per-coordinate Gaussian noise, giving direct
control over the intra/inter-event cosine-distance separation.  Event
start times are uniform over the corpus span; documents are uniform over
their event's interval.  Everything is deterministic given the seed.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, TextIO

import numpy as np

from .core import EmbeddingMatrix, Document, FsdParams, normalize_rows
from .fsd import run_fsd
from .ingest import CorpusBundle, sort_chronologically
from .metrics import NoGoldLabelsError, evaluate


@dataclass(frozen=True)
class SynthSpec:
    n_events: int
    docs_per_event: int
    dim: int
    noise_sigma: float
    event_duration_s: int
    corpus_span_s: int
    seed: int

    def __post_init__(self) -> None:
        if self.n_events < 1 or self.docs_per_event < 1 or self.dim < 1:
            raise ValueError("n_events, docs_per_event and dim must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if not 0 < self.event_duration_s <= self.corpus_span_s:
            raise ValueError("event_duration_s must fit within corpus_span_s")


def generate_synthetic(spec: SynthSpec) -> CorpusBundle:
    """Planted-event corpus with gold labels, sorted chronologically."""
    rng = np.random.default_rng(spec.seed)
    docs: list[Document] = []
    blocks = []
    for k in range(spec.n_events):
        center = rng.standard_normal(spec.dim)
        center /= np.linalg.norm(center)
        start = int(rng.integers(0, spec.corpus_span_s - spec.event_duration_s + 1))
        stamps = rng.integers(start, start + spec.event_duration_s, spec.docs_per_event)
        vectors = center + spec.noise_sigma * rng.standard_normal(
            (spec.docs_per_event, spec.dim)
        )
        blocks.append(vectors.astype(np.float32))
        for i, ts in enumerate(stamps):
            docs.append(
                Document(
                    id=f"e{k}-{i}",
                    timestamp=int(ts),
                    row=len(docs),
                    gold_label=f"e{k}",
                )
            )
    matrix = normalize_rows(EmbeddingMatrix(np.concatenate(blocks)))
    return sort_chronologically(CorpusBundle(docs, matrix))


class SweepRow(NamedTuple):
    threshold: float
    ari: float
    ami: float
    cluster_count: int


@dataclass(frozen=True)
class SweepReport:
    rows: list[SweepRow]
    best_threshold: float


def threshold_grid(t_min: float, t_max: float, t_step: float) -> list[float]:
    if not 0 < t_min < t_max <= 2:
        raise ValueError(f"need 0 < t_min < t_max <= 2, got [{t_min}, {t_max}]")
    if t_step <= 0:
        raise ValueError("t_step must be positive")
    count = int(np.floor((t_max - t_min) / t_step + 1e-9)) + 1
    return [round(t_min + i * t_step, 10) for i in range(count)]


def sweep_threshold(
    bundle: CorpusBundle,
    window: int,
    batch: int = 8,
    workers: int = 1,
    t_min: float = 0.10,
    t_max: float = 0.90,
    t_step: float = 0.05,
) -> SweepReport:
    """Grid-search the distance threshold, scoring each run against gold labels.

    The best threshold is the one with the highest AMI; ties go to the
    smaller threshold.
    """
    if sum(d.gold_label is not None for d in bundle.documents) < 2:
        raise NoGoldLabelsError()
    rows = []
    best: Optional[SweepRow] = None
    for t in threshold_grid(t_min, t_max, t_step):
        params = FsdParams(threshold=t, window=window, batch=batch, workers=workers)
        result = run_fsd(bundle.documents, bundle.matrix, params)
        report = evaluate(result.labels, bundle.documents)
        row = SweepRow(t, report.ari, report.ami, result.cluster_count)
        rows.append(row)
        if best is None or row.ami > best.ami:
            best = row
    return SweepReport(rows=rows, best_threshold=best.threshold)


class BenchRow(NamedTuple):
    batch: int
    seconds: float
    ami: Optional[float]


def bench_batch_sizes(
    bundle: CorpusBundle,
    threshold: float,
    window: int,
    batch_sizes: Sequence[int],
    workers: int = 1,
) -> list[BenchRow]:
    """Time one FSD run per batch size, serially to avoid interference."""
    has_gold = sum(d.gold_label is not None for d in bundle.documents) >= 2
    rows = []
    for b in batch_sizes:
        params = FsdParams(threshold=threshold, window=window, batch=b, workers=workers)
        start = time.perf_counter()
        result = run_fsd(bundle.documents, bundle.matrix, params)
        seconds = time.perf_counter() - start
        ami = evaluate(result.labels, bundle.documents).ami if has_gold else None
        rows.append(BenchRow(b, seconds, ami))
    return rows


def write_sweep_csv(report: SweepReport, out: TextIO) -> None:
    writer = csv.writer(out)
    writer.writerow(["threshold", "ari", "ami", "cluster_count"])
    for row in report.rows:
        writer.writerow([row.threshold, f"{row.ari:.6f}", f"{row.ami:.6f}", row.cluster_count])


def write_bench_csv(rows: Sequence[BenchRow], out: TextIO) -> None:
    writer = csv.writer(out)
    writer.writerow(["batch", "seconds", "ami"])
    for row in rows:
        writer.writerow(
            [row.batch, f"{row.seconds:.6f}", "" if row.ami is None else f"{row.ami:.6f}"]
        )
