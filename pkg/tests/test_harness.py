import io

import numpy as np
import pytest

from fsdstream import (
    FsdParams,
    SynthSpec,
    bench_batch_sizes,
    generate_synthetic,
    run_fsd,
    sweep_threshold,
)
from fsdstream.core import dot_rows
from fsdstream.harness import threshold_grid, write_bench_csv, write_sweep_csv
from fsdstream.metrics import NoGoldLabelsError


def small_spec(**overrides):
    base = dict(
        n_events=4,
        docs_per_event=25,
        dim=32,
        noise_sigma=0.05,
        event_duration_s=3600,
        corpus_span_s=86400,
        seed=99,
    )
    base.update(overrides)
    return SynthSpec(**base)


class TestGenerateSynthetic:
    def test_shapes_and_sorting(self):
        b = generate_synthetic(small_spec())
        assert len(b.documents) == 100
        assert b.matrix.n == 100
        stamps = [d.timestamp for d in b.documents]
        assert stamps == sorted(stamps)
        assert all(d.row == i for i, d in enumerate(b.documents))

    def test_zero_noise_collapses_events(self):
        b = generate_synthetic(small_spec(noise_sigma=0.0))
        by_event = {}
        for d in b.documents:
            by_event.setdefault(d.gold_label, []).append(d.row)
        for rows in by_event.values():
            block = b.matrix.data[rows]
            d = 1.0 - dot_rows(block, block[0])
            assert np.all(np.abs(d) < 1e-6)

    def test_single_event_single_label(self):
        b = generate_synthetic(small_spec(n_events=1))
        assert {d.gold_label for d in b.documents} == {"e0"}

    def test_seed_determinism(self):
        b1 = generate_synthetic(small_spec())
        b2 = generate_synthetic(small_spec())
        assert b1.documents == b2.documents
        assert b1.matrix.data.tobytes() == b2.matrix.data.tobytes()

    def test_different_seeds_differ(self):
        b1 = generate_synthetic(small_spec(seed=1))
        b2 = generate_synthetic(small_spec(seed=2))
        assert b1.matrix.data.tobytes() != b2.matrix.data.tobytes()

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            small_spec(noise_sigma=-1.0)
        with pytest.raises(ValueError):
            small_spec(event_duration_s=10**9, corpus_span_s=10)


class TestThresholdGrid:
    def test_default_style_grid(self):
        grid = threshold_grid(0.10, 0.90, 0.05)
        assert grid[0] == 0.10
        assert grid[-1] == 0.90
        assert len(grid) == 17

    def test_step_larger_than_range(self):
        assert threshold_grid(0.3, 0.5, 0.9) == [0.3]

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            threshold_grid(0.5, 0.4, 0.1)


class TestSweep:
    def test_planted_corpus_reaches_perfect_score(self):
        # intra-event distances ~0.3, inter-event ~1: a band of interior
        # thresholds recovers the planted clustering exactly
        b = generate_synthetic(small_spec(noise_sigma=0.12))
        report = sweep_threshold(b, window=len(b.documents), batch=8)
        assert max(r.ami for r in report.rows) == 1.0
        best = [r for r in report.rows if r.threshold == report.best_threshold][0]
        assert best.ami == 1.0
        assert 0.1 < report.best_threshold < 1.0

    def test_tie_prefers_smaller_threshold(self):
        b = generate_synthetic(small_spec())
        report = sweep_threshold(b, window=len(b.documents), batch=8)
        perfect = [r.threshold for r in report.rows if r.ami == 1.0]
        assert report.best_threshold == min(perfect)

    def test_determinism(self):
        b = generate_synthetic(small_spec())
        r1 = sweep_threshold(b, window=100, t_min=0.2, t_max=0.6, t_step=0.2)
        r2 = sweep_threshold(b, window=100, t_min=0.2, t_max=0.6, t_step=0.2)
        assert r1 == r2

    def test_requires_gold_labels(self):
        b = generate_synthetic(small_spec())
        from dataclasses import replace

        from fsdstream.ingest import CorpusBundle

        docs = [replace(d, gold_label=None) for d in b.documents]
        with pytest.raises(NoGoldLabelsError):
            sweep_threshold(CorpusBundle(docs, b.matrix), window=100)


class TestBench:
    def test_rows_shape(self):
        b = generate_synthetic(small_spec())
        rows = bench_batch_sizes(b, threshold=0.3, window=100, batch_sizes=[1, 2, 4, 8])
        assert [r.batch for r in rows] == [1, 2, 4, 8]
        assert all(r.seconds > 0 for r in rows)
        assert all(r.ami is not None for r in rows)

    def test_csv_output(self):
        b = generate_synthetic(small_spec())
        rows = bench_batch_sizes(b, threshold=0.3, window=100, batch_sizes=[1, 8])
        buf = io.StringIO()
        write_bench_csv(rows, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "batch,seconds,ami"
        assert len(lines) == 3

    def test_sweep_csv_output(self):
        b = generate_synthetic(small_spec())
        report = sweep_threshold(b, window=100, t_min=0.2, t_max=0.4, t_step=0.1)
        buf = io.StringIO()
        write_sweep_csv(report, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "threshold,ari,ami,cluster_count"
        assert len(lines) == 4


def test_fsd_output_deterministic_on_synthetic():
    b = generate_synthetic(small_spec())
    params = FsdParams(0.3, window=100, batch=8, workers=2)
    r1 = run_fsd(b.documents, b.matrix, params)
    r2 = run_fsd(b.documents, b.matrix, params)
    assert np.array_equal(r1.labels, r2.labels)
