"""Rayleigh-Ritz extraction of approximate singular triplets.

Given orthonormal search bases U (left, m-by-s1) and V (right, n-by-s2), the
projected matrix H = U^T A V carries a small singular value problem whose
triplets (theta_i, f_i, g_i) yield Ritz singular values theta_i and Ritz
vectors U f_i, V g_i. All updating algorithms in this package are instances
of this one procedure with different (U, V) pairs; every theta_i is a lower
bound on the corresponding singular value of A, and enlarging either search
space can only increase the theta_i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import dense_svd
from .model import LatentModel
from .operators import LinearOperator
from .sparse import SparseMatrix, matmat, spmv


@dataclass(frozen=True)
class RitzFactor:
    """Dominant triplets of a projected matrix H.

    theta: k values, nonnegative descending. F (s1-by-k) and G (s2-by-k) are
    the coefficient matrices with orthonormal columns: H g_i = theta_i f_i
    and H^T f_i = theta_i g_i.
    """

    theta: np.ndarray
    F: np.ndarray
    G: np.ndarray


def _apply_to_columns(a, v: np.ndarray) -> np.ndarray:
    """A @ V for A given as a dense array, SparseMatrix, or LinearOperator."""
    if isinstance(a, SparseMatrix):
        return matmat(a, v)
    if isinstance(a, LinearOperator):
        return a.apply_matrix(v)
    return np.asarray(a, dtype=np.float64) @ v


def _apply_to_vector(a, v: np.ndarray) -> np.ndarray:
    if isinstance(a, SparseMatrix):
        return spmv(a, v)
    if isinstance(a, LinearOperator):
        return a.apply(v)
    return np.asarray(a, dtype=np.float64) @ v


def projected_matrix(a, u, v) -> np.ndarray:
    """H = U^T A V, materialized densely (s1 and s2 are small by design)."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return u.T @ _apply_to_columns(a, v)


def ritz_from_projected(h: np.ndarray, k: int) -> RitzFactor:
    """Top-k triplets of an explicit projected matrix."""
    if not 1 <= k <= min(h.shape):
        raise ValueError(f"k must be in [1, min{h.shape}], got {k}")
    s, f, g = dense_svd(h)
    return RitzFactor(theta=s[:k], F=f[:, :k], G=g[:, :k])


def sv_rr(a, u, v, k: int) -> tuple[RitzFactor, LatentModel]:
    """Ritz singular triplets of A with respect to search bases U and V.

    Returns the projected-problem factor (theta, F, G) together with the
    assembled model (theta, U F, V G). Equal theta are kept in the stable
    order the dense SVD produced.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    factor = ritz_from_projected(projected_matrix(a, u, v), k)
    model = LatentModel(sigma=factor.theta, U=u @ factor.F, V=v @ factor.G)
    return factor, model


def rayleigh_quotient(a, u, v) -> float:
    """2 u^T A v / (||u||^2 + ||v||^2), the quotient governing Ritz values.

    This is the Rayleigh quotient of the symmetric augmented matrix
    [[0, A], [A^T, 0]] at the stacked vector (u, v); its maximum over unit
    u, v in the search spaces is the largest Ritz singular value.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    denom = float(u @ u + v @ v)
    if denom == 0.0:
        raise ValueError("u and v cannot both be zero")
    return 2.0 * float(u @ _apply_to_vector(a, v)) / denom
