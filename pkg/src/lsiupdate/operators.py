"""Linear operators accessed through matrix-vector products.

The reduced updating schemes never materialize the deflated blocks
(I - Q Q^T) S; they only need products with them and their transposes. The
operators here provide that access for dense arrays, CSC matrices, and the
deflated combinations.
"""

from __future__ import annotations

import numpy as np

from .linalg import project_out
from .sparse import SparseMatrix, spmv, spmv_t


class LinearOperator:
    """Minimal matrix-free interface: shape plus apply / apply_transpose."""

    rows: int
    cols: int

    def apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply_transpose(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def apply_matrix(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        out = np.empty((self.rows, x.shape[1]))
        for j in range(x.shape[1]):
            out[:, j] = self.apply(x[:, j])
        return out

    def to_dense(self) -> np.ndarray:
        return self.apply_matrix(np.eye(self.cols))


class DenseOperator(LinearOperator):
    def __init__(self, a):
        self.a = np.asarray(a, dtype=np.float64)
        if self.a.ndim != 2:
            raise ValueError("expected a 2-d array")
        self.rows, self.cols = self.a.shape

    def apply(self, x):
        return self.a @ x

    def apply_transpose(self, y):
        return self.a.T @ y

    def to_dense(self):
        return self.a.copy()


class SparseOperator(LinearOperator):
    def __init__(self, a: SparseMatrix):
        self.a = a
        self.rows, self.cols = a.shape

    def apply(self, x):
        return spmv(self.a, x)

    def apply_transpose(self, y):
        return spmv_t(self.a, y)

    def to_dense(self):
        return self.a.to_dense()


class DeflatedOperator(LinearOperator):
    """(I - Q Q^T) S for an orthonormal basis Q and sparse core S.

    With transpose_core the core is used as S = core^T, which covers all four
    deflated blocks arising in the updates: the added-document and selection
    blocks use the core directly, the added-term and weight-correction blocks
    use its transpose. Outputs of apply() are orthogonal to span(Q); the
    projection runs two passes to keep that true deep into long recurrences.
    """

    def __init__(self, basis, core: SparseMatrix, transpose_core: bool = False):
        self.basis = np.asarray(basis, dtype=np.float64)
        self.core = core
        self.transpose_core = transpose_core
        core_rows = core.cols if transpose_core else core.rows
        core_cols = core.rows if transpose_core else core.cols
        if self.basis.shape[0] != core_rows:
            raise ValueError(
                f"basis rows {self.basis.shape[0]} do not match core rows {core_rows}"
            )
        self.rows = core_rows
        self.cols = core_cols

    def _core_apply(self, x):
        return spmv_t(self.core, x) if self.transpose_core else spmv(self.core, x)

    def _core_apply_transpose(self, y):
        return spmv(self.core, y) if self.transpose_core else spmv_t(self.core, y)

    def apply(self, x):
        return project_out(self.basis, self._core_apply(x), passes=2)

    def apply_transpose(self, y):
        return self._core_apply_transpose(project_out(self.basis, y, passes=2))

    def to_dense(self):
        dense = self.core.to_dense()
        if self.transpose_core:
            dense = dense.T
        return project_out(self.basis, dense, passes=2)


def adjoint_defect(op: LinearOperator, rng: np.random.Generator, probes: int = 3) -> float:
    """max over random probes of |y^T (A x) - (A^T y)^T x|, scaled to unit probes."""
    worst = 0.0
    for _ in range(probes):
        x = rng.standard_normal(op.cols)
        y = rng.standard_normal(op.rows)
        x /= np.linalg.norm(x) or 1.0
        y /= np.linalg.norm(y) or 1.0
        worst = max(worst, abs(y @ op.apply(x) - op.apply_transpose(y) @ x))
    return worst
