"""Dense factorization kernels shared by all updating algorithms.

Thin wrappers over LAPACK (Householder QR without pivoting, full SVD) that pin
deterministic sign conventions, plus the orthogonal-complement projection used
to deflate update blocks against the current singular subspaces.
"""

from __future__ import annotations

import numpy as np


def _require_finite(m: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{what} contains non-finite entries")
    return m


def thin_qr(m) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR factorization M = Q R with nonnegative diagonal of R.

    M must be m-by-p with m >= p >= 1. Rank-deficient input is allowed; the
    corresponding diagonal entries of R are (numerically) zero.
    """
    m = _require_finite(m, "QR input")
    if m.ndim != 2:
        raise ValueError("QR input must be 2-d")
    rows, cols = m.shape
    if not rows >= cols >= 1:
        raise ValueError(f"thin QR requires rows >= cols >= 1, got {m.shape}")
    q, r = np.linalg.qr(m, mode="reduced")
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return q * signs, r * signs[:, None]


def dense_svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD of a dense matrix as (values, left, right).

    Values are nonnegative and descending; left is a-by-r, right is b-by-r
    with r = min(a, b). Signs are fixed so each left vector's entry of largest
    magnitude is nonnegative (first such index on ties), which makes repeated
    runs byte-reproducible.
    """
    m = _require_finite(m, "SVD input")
    if m.ndim != 2:
        raise ValueError("SVD input must be 2-d")
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    v = vt.T
    if u.shape[1]:
        pivot = np.argmax(np.abs(u), axis=0)
        signs = np.where(u[pivot, np.arange(u.shape[1])] < 0.0, -1.0, 1.0)
        u = u * signs
        v = v * signs
    return s, u, v


def project_out(basis, x, passes: int = 1) -> np.ndarray:
    """Component of x orthogonal to the span of an orthonormal basis.

    Computes x - Q (Q^T x) for Q = basis; x may be a vector or a matrix of
    columns. A second pass (passes=2) is used inside Krylov recurrences where
    a single classical Gram-Schmidt step would slowly lose orthogonality.
    """
    basis = np.asarray(basis, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if basis.ndim != 2:
        raise ValueError("basis must be 2-d")
    if x.shape[0] != basis.shape[0]:
        raise ValueError(f"dimension mismatch: basis {basis.shape}, x {x.shape}")
    if passes < 1:
        raise ValueError("passes must be >= 1")
    if basis.shape[1] == 0:
        return x.copy()
    out = x
    for _ in range(passes):
        out = out - basis @ (basis.T @ out)
    return out


def orthonormality_defect(q) -> float:
    """max |Q^T Q - I|, the departure of columns from orthonormality."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape[1] == 0:
        return 0.0
    g = q.T @ q
    return float(np.max(np.abs(g - np.eye(q.shape[1]))))


def is_orthonormal(q, tol: float = 1e-10) -> bool:
    return orthonormality_defect(q) <= tol
