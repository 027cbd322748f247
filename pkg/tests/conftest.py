import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fsdstream import EmbeddingMatrix, normalize_rows


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def unit_matrix(rng, n, dim):
    """Random unit-row matrix for tests."""
    return normalize_rows(EmbeddingMatrix(rng.standard_normal((n, dim)).astype(np.float32)))
