"""Shared fixtures: small codes built once per session."""

import numpy as np
import pytest

from blissdec import CodeSpec, SparseParityCheckMatrix, build_systematic_code

HAMMING_H = np.array([
    [1, 1, 0, 1, 1, 0, 0],
    [1, 0, 1, 1, 0, 1, 0],
    [0, 1, 1, 1, 0, 0, 1]], dtype=np.uint8)


@pytest.fixture(scope="session")
def hamming():
    return SparseParityCheckMatrix.from_dense(HAMMING_H)


@pytest.fixture(scope="session")
def small_encoder():
    """60/24 J=3 code with valid Bliss geometry (n_sys=36, M even)."""
    return build_systematic_code(CodeSpec(n=60, m=24, col_weight=3, seed=3))
