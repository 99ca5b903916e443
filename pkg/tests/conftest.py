"""Shared generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from lsiupdate import LatentModel, SparseMatrix, model_from_dense


def random_sparse(rng, rows, cols, density=0.3, nonneg=True) -> SparseMatrix:
    mask = rng.random((rows, cols)) < density
    vals = rng.random((rows, cols)) if nonneg else rng.standard_normal((rows, cols))
    return SparseMatrix.from_dense(np.where(mask, vals, 0.0))


def random_orthonormal(rng, rows, cols) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q


def random_model(rng, rows, cols, k) -> tuple[LatentModel, np.ndarray]:
    """A rank-k model plus the dense matrix it was truncated from."""
    dense = np.where(rng.random((rows, cols)) < 0.4, rng.random((rows, cols)), 0.0)
    return model_from_dense(dense, k), dense


def selection_matrix(rng, rows, p) -> SparseMatrix:
    picked = rng.choice(rows, size=p, replace=False)
    return SparseMatrix.from_coo(rows, p, picked, np.arange(p), np.ones(p))


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
