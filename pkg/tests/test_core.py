import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsdstream import (
    DimMismatchError,
    EmbeddingMatrix,
    EmptySetError,
    FsdParams,
    ZeroVectorError,
    cosine_distance,
    nearest_in_set,
    normalize_rows,
)
from fsdstream.core import dot_rows

from conftest import unit_matrix
from oracles import naive_nearest


class TestNormalizeRows:
    def test_three_four_five(self):
        m = normalize_rows(EmbeddingMatrix(np.array([[3.0, 4.0]], dtype=np.float32)))
        np.testing.assert_allclose(m.data[0], [0.6, 0.8], atol=1e-7)

    def test_already_unit_is_unchanged(self, rng):
        m = unit_matrix(rng, 10, 8)
        again = normalize_rows(m)
        np.testing.assert_allclose(again.data, m.data, atol=1e-7)

    def test_zero_row_rejected(self):
        data = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 2.0], [0.0, 0.0]], dtype=np.float32)
        with pytest.raises(ZeroVectorError) as exc:
            normalize_rows(EmbeddingMatrix(data))
        assert exc.value.rows == [1, 3]

    def test_all_rows_unit_norm(self, rng):
        m = normalize_rows(EmbeddingMatrix(rng.standard_normal((100, 33)).astype(np.float32) * 7))
        norms = np.linalg.norm(m.data.astype(np.float64), axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-5)


class TestCosineDistance:
    def test_identical_is_zero(self, rng):
        u = unit_matrix(rng, 1, 16).data[0]
        assert cosine_distance(u, u) == pytest.approx(0.0, abs=1e-6)

    def test_orthogonal_is_one(self):
        u = np.array([1.0, 0.0], dtype=np.float32)
        v = np.array([0.0, 1.0], dtype=np.float32)
        assert cosine_distance(u, v) == 1.0

    def test_antipodal_is_two(self, rng):
        u = unit_matrix(rng, 1, 16).data[0]
        assert cosine_distance(u, -u) == pytest.approx(2.0, abs=1e-6)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatchError):
            cosine_distance(np.zeros(3, dtype=np.float32), np.zeros(4, dtype=np.float32))

    def test_symmetry_exact(self, rng):
        m = unit_matrix(rng, 40, 24).data
        for i in range(0, 40, 2):
            assert cosine_distance(m[i], m[i + 1]) == cosine_distance(m[i + 1], m[i])

    @given(seed=st.integers(0, 10_000), dim=st.integers(2, 64))
    @settings(max_examples=60, deadline=None)
    def test_range_on_unit_vectors(self, seed, dim):
        r = np.random.default_rng(seed)
        m = unit_matrix(r, 2, dim).data
        d = cosine_distance(m[0], m[1])
        assert 0.0 - 1e-6 <= d <= 2.0 + 1e-6


class TestDotRows:
    def test_chunking_does_not_change_bits(self, rng):
        m = unit_matrix(rng, 500, 48).data
        q = m[0]
        full = dot_rows(m, q)
        for lo, hi in ((0, 499), (3, 200), (117, 500), (250, 251)):
            np.testing.assert_array_equal(dot_rows(m[lo:hi], q), full[lo:hi])

    def test_batched_matches_single(self, rng):
        m = unit_matrix(rng, 200, 32).data
        queries = m[:7]
        batched = dot_rows(m, queries)
        for k in range(7):
            np.testing.assert_array_equal(batched[k], dot_rows(m, queries[k]))


class TestNearestInSet:
    def test_singleton(self, rng):
        m = unit_matrix(rng, 5, 8)
        row, d = nearest_in_set(m.data[0], [3], m)
        assert row == 3
        assert d == cosine_distance(m.data[0], m.data[3])

    def test_exact_match_found(self, rng):
        m = unit_matrix(rng, 50, 16)
        row, d = nearest_in_set(m.data[17], list(range(50)), m)
        assert row == 17
        assert d == 0.0

    def test_empty_set(self, rng):
        m = unit_matrix(rng, 5, 8)
        with pytest.raises(EmptySetError):
            nearest_in_set(m.data[0], [], m)

    def test_tie_prefers_largest_row(self, rng):
        base = unit_matrix(rng, 4, 8).data
        data = np.vstack([base, base[1:2]])  # row 4 duplicates row 1
        m = EmbeddingMatrix(data)
        row, _ = nearest_in_set(base[1], [0, 1, 2, 3, 4], m)
        assert row == 4

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_matches_bruteforce_oracle(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(2, 200))
        dim = int(r.integers(2, 64))
        m = unit_matrix(r, n, dim)
        rows = sorted(r.choice(n, size=int(r.integers(1, n + 1)), replace=False).tolist())
        q = m.data[int(r.integers(0, n))]
        assert nearest_in_set(q, rows, m) == naive_nearest(q, rows, m.data)

    def test_bruteforce_with_duplicated_rows(self, rng):
        m = unit_matrix(rng, 100, 16)
        data = np.vstack([m.data, m.data[:20]])
        dup = EmbeddingMatrix(data)
        for q_idx in range(0, 100, 10):
            q = data[q_idx]
            rows = list(range(120))
            assert nearest_in_set(q, rows, dup) == naive_nearest(q, rows, data)


class TestFsdParams:
    @pytest.mark.parametrize("t", [0.0, -0.1, 2.1])
    def test_bad_threshold(self, t):
        with pytest.raises(ValueError):
            FsdParams(threshold=t, window=10)

    def test_batch_cannot_exceed_window(self):
        with pytest.raises(ValueError):
            FsdParams(threshold=0.5, window=4, batch=5)

    def test_threshold_two_is_allowed(self):
        FsdParams(threshold=2.0, window=10)
