"""Compressed-column sparse matrices and the matrix-vector kernels built on them.

The whole package works with nonnegative term-document matrices that are far
too sparse to densify at realistic sizes, so every product that touches the
raw data goes through the CSC kernels here. Costs are proportional to the
number of stored entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SparseMatrix:
    """An m-by-n real sparse matrix in compressed-column (CSC) layout.

    Canonical form is enforced at construction: row indices strictly increase
    within each column, no explicit zeros are stored, all values are finite,
    and the pointer array is consistent with the stored entry count. Instances
    are immutable; the underlying arrays are marked read-only.
    """

    rows: int
    cols: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "data", data)
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if indptr.shape != (self.cols + 1,):
            raise ValueError("indptr must have cols + 1 entries")
        if indptr[0] != 0 or indptr[-1] != len(data):
            raise ValueError("indptr inconsistent with stored entry count")
        if np.any(np.diff(indptr) < 0):
            raise ValueError("indptr must be nondecreasing")
        if len(indices) != len(data):
            raise ValueError("indices and data length mismatch")
        if len(indices) and (indices.min() < 0 or indices.max() >= self.rows):
            raise ValueError("row index out of range")
        if not np.all(np.isfinite(data)):
            raise ValueError("non-finite value in sparse matrix")
        if np.any(data == 0.0):
            raise ValueError("explicit zero stored; canonicalize first")
        for j in range(self.cols):
            col = indices[indptr[j]:indptr[j + 1]]
            if len(col) > 1 and np.any(np.diff(col) <= 0):
                raise ValueError(f"row indices not strictly increasing in column {j}")
        for arr in (indptr, indices, data):
            arr.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.data)

    @classmethod
    def from_coo(cls, rows, cols, row_idx, col_idx, values) -> "SparseMatrix":
        """Build from triplets, summing duplicates and dropping resulting zeros."""
        row_idx = np.asarray(row_idx, dtype=np.int64)
        col_idx = np.asarray(col_idx, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if not (len(row_idx) == len(col_idx) == len(values)):
            raise ValueError("triplet arrays must have equal length")
        if len(row_idx):
            if row_idx.min() < 0 or row_idx.max() >= rows:
                raise ValueError("row index out of range")
            if col_idx.min() < 0 or col_idx.max() >= cols:
                raise ValueError("column index out of range")
        order = np.lexsort((row_idx, col_idx))
        row_idx, col_idx, values = row_idx[order], col_idx[order], values[order]
        if len(values):
            keys = col_idx * np.int64(rows if rows else 1) + row_idx
            first = np.concatenate(([True], keys[1:] != keys[:-1]))
            groups = np.cumsum(first) - 1
            summed = np.bincount(groups, weights=values)
            row_idx, col_idx = row_idx[first], col_idx[first]
            keep = summed != 0.0
            row_idx, col_idx, summed = row_idx[keep], col_idx[keep], summed[keep]
        else:
            summed = values
        indptr = np.zeros(cols + 1, dtype=np.int64)
        np.add.at(indptr, col_idx + 1, 1)
        indptr = np.cumsum(indptr)
        return cls(rows, cols, indptr, row_idx, summed)

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        row_idx, col_idx = np.nonzero(a)
        return cls.from_coo(a.shape[0], a.shape[1], row_idx, col_idx, a[row_idx, col_idx])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        for j in range(self.cols):
            sl = slice(self.indptr[j], self.indptr[j + 1])
            out[self.indices[sl], j] = self.data[sl]
        return out

    def column(self, j: int) -> np.ndarray:
        """Column j as a dense vector."""
        if not 0 <= j < self.cols:
            raise IndexError("column index out of range")
        out = np.zeros(self.rows)
        sl = slice(self.indptr[j], self.indptr[j + 1])
        out[self.indices[sl]] = self.data[sl]
        return out

    def slice_cols(self, start: int, stop: int) -> "SparseMatrix":
        """Contiguous column slice [start, stop) as a new matrix."""
        if not (0 <= start <= stop <= self.cols):
            raise IndexError("column slice out of range")
        lo, hi = self.indptr[start], self.indptr[stop]
        return SparseMatrix(
            self.rows,
            stop - start,
            self.indptr[start:stop + 1] - lo,
            self.indices[lo:hi].copy(),
            self.data[lo:hi].copy(),
        )

    def transpose(self) -> "SparseMatrix":
        col_ids = np.repeat(np.arange(self.cols, dtype=np.int64), np.diff(self.indptr))
        return SparseMatrix.from_coo(self.cols, self.rows, col_ids, self.indices, self.data)

    def row_counts(self) -> np.ndarray:
        """Number of stored entries per row (document frequency when columns are docs)."""
        return np.bincount(self.indices, minlength=self.rows).astype(np.int64)

    def row_sums(self) -> np.ndarray:
        return np.bincount(self.indices, weights=self.data, minlength=self.rows)

    def scale_rows(self, factors) -> "SparseMatrix":
        """Multiply row i by factors[i], dropping entries that become zero."""
        factors = np.asarray(factors, dtype=np.float64)
        if factors.shape != (self.rows,):
            raise ValueError("factor vector has wrong length")
        data = self.data * factors[self.indices]
        keep = data != 0.0
        col_ids = np.repeat(np.arange(self.cols, dtype=np.int64), np.diff(self.indptr))
        return SparseMatrix.from_coo(
            self.rows, self.cols, self.indices[keep], col_ids[keep], data[keep]
        )

    def map_values(self, fn) -> "SparseMatrix":
        """Apply an elementwise function to stored values, dropping new zeros."""
        data = np.asarray(fn(self.data), dtype=np.float64)
        if data.shape != self.data.shape:
            raise ValueError("value map must preserve shape")
        keep = data != 0.0
        col_ids = np.repeat(np.arange(self.cols, dtype=np.int64), np.diff(self.indptr))
        return SparseMatrix.from_coo(
            self.rows, self.cols, self.indices[keep], col_ids[keep], data[keep]
        )

    def _col_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.cols, dtype=np.int64), np.diff(self.indptr))


def spmv(a: SparseMatrix, x) -> np.ndarray:
    """Sparse product A @ x. Cost O(nnz)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (a.cols,):
        raise ValueError(f"dimension mismatch: {a.shape} @ {x.shape}")
    if a.nnz == 0:
        return np.zeros(a.rows)
    return np.bincount(a.indices, weights=a.data * x[a._col_ids()], minlength=a.rows)


def spmv_t(a: SparseMatrix, y) -> np.ndarray:
    """Sparse product A.T @ y. Cost O(nnz)."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (a.rows,):
        raise ValueError(f"dimension mismatch: {a.shape}.T @ {y.shape}")
    if a.nnz == 0:
        return np.zeros(a.cols)
    return np.bincount(a._col_ids(), weights=a.data * y[a.indices], minlength=a.cols)


def matmat(a: SparseMatrix, x) -> np.ndarray:
    """Sparse-dense product A @ X for dense X with matching row count."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return spmv(a, x)
    if x.shape[0] != a.cols:
        raise ValueError(f"dimension mismatch: {a.shape} @ {x.shape}")
    out = np.empty((a.rows, x.shape[1]))
    for j in range(x.shape[1]):
        out[:, j] = spmv(a, x[:, j])
    return out


def matmat_t(a: SparseMatrix, y) -> np.ndarray:
    """Sparse-dense product A.T @ Y for dense Y."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        return spmv_t(a, y)
    if y.shape[0] != a.rows:
        raise ValueError(f"dimension mismatch: {a.shape}.T @ {y.shape}")
    out = np.empty((a.cols, y.shape[1]))
    for j in range(y.shape[1]):
        out[:, j] = spmv_t(a, y[:, j])
    return out
