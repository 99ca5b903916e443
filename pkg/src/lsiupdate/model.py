"""The maintained rank-k latent model: k singular values with their factors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import orthonormality_defect


@dataclass(frozen=True)
class LatentModel:
    """Truncated SVD state (sigma, U, V): k values, left m-by-k, right n-by-k.

    sigma is nonnegative and descending; U and V have orthonormal columns.
    Instances are immutable snapshots: an update produces a new model, and a
    model being read (query scoring) is never touched by the writer.
    """

    sigma: np.ndarray
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=np.float64)
        u = np.asarray(self.U, dtype=np.float64)
        v = np.asarray(self.V, dtype=np.float64)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "U", u)
        object.__setattr__(self, "V", v)
        if sigma.ndim != 1 or u.ndim != 2 or v.ndim != 2:
            raise ValueError("sigma must be a vector, U and V matrices")
        k = len(sigma)
        if u.shape[1] != k or v.shape[1] != k:
            raise ValueError("factor column counts must equal len(sigma)")
        if np.any(sigma < 0.0) or np.any(np.diff(sigma) > 0.0):
            raise ValueError("sigma must be nonnegative and descending")

    @property
    def k(self) -> int:
        return len(self.sigma)

    @property
    def terms(self) -> int:
        return self.U.shape[0]

    @property
    def documents(self) -> int:
        return self.V.shape[0]

    def validate(self, tol: float = 1e-10) -> None:
        """Raise if the orthonormality invariants have drifted beyond tol."""
        du = orthonormality_defect(self.U)
        dv = orthonormality_defect(self.V)
        if max(du, dv) > tol:
            raise ValueError(f"factor orthonormality defect {max(du, dv):.3e} > {tol:.1e}")

    def reconstruct(self) -> np.ndarray:
        """Dense U diag(sigma) V^T; for small oracle checks only."""
        return (self.U * self.sigma) @ self.V.T


def model_from_dense(a, k: int) -> LatentModel:
    """Rank-k truncation of a dense matrix. Oracle and small-problem path."""
    from .linalg import dense_svd

    a = np.asarray(a, dtype=np.float64)
    if not 1 <= k <= min(a.shape):
        raise ValueError(f"k must be in [1, min{a.shape}]")
    s, u, v = dense_svd(a)
    return LatentModel(sigma=s[:k], U=u[:, :k], V=v[:, :k])
