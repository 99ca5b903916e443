"""Golub-Kahan-Lanczos bidiagonalization and the partial SVD solver on top of it.

l steps of the recurrence build orthonormal bases P_l (left) and Q_{l+1}
(right) of the Krylov subspaces generated by M M^T and M^T M, together with a
lower-dimensional bidiagonal matrix B with diagonal alpha_1..alpha_l and
superdiagonal beta_1..beta_l, tied to M by

    M Q_l   = P_l B_l,
    M^T P_l = Q_{l+1} B_underline_l^T,

where B_l drops the last superdiagonal column. Only one of the two vector
sets is reorthogonalized (the shorter one); the other stays near-orthogonal
through the three-term recurrence, which is what makes the procedure cheaper
than computing singular vectors outright.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import LinearOperator

# Relative breakdown threshold: a recurrence norm this far below the largest
# quantity seen so far means the Krylov space is exhausted.
_BREAKDOWN_RTOL = 1e-13


@dataclass(frozen=True)
class GklFactorization:
    """Output of l' completed bidiagonalization steps.

    P has l' columns. Q has l' + 1 columns, except after a terminal beta
    breakdown where the next right vector does not exist and Q has l'
    columns (betas[-1] is 0 in that case). alphas and betas both have
    length l'.
    """

    P: np.ndarray
    Q: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    requested: int
    breakdown: bool

    @property
    def effective_l(self) -> int:
        return len(self.alphas)

    def bidiag(self) -> np.ndarray:
        """The l'-by-Q_cols bidiagonal block consistent with P and Q."""
        le, qc = self.effective_l, self.Q.shape[1]
        b = np.zeros((le, qc))
        for i in range(le):
            b[i, i] = self.alphas[i]
            if i + 1 < qc:
                b[i, i + 1] = self.betas[i]
        return b

    def square_bidiag(self) -> np.ndarray:
        """The square l'-by-l' block (last superdiagonal column dropped)."""
        return self.bidiag()[:, : self.effective_l]


@dataclass(frozen=True)
class PartialSvd:
    """Approximate dominant singular triplets extracted from a GKL subspace.

    values are nonnegative and descending; left/right have one column per
    value. residual is ||M Y - X diag(S)||_F measured at return, which is the
    accuracy bound recorded for the triplets. On breakdown the Krylov space
    is exhausted and the triplets are exact for the operator (residual at
    rounding level).
    """

    values: np.ndarray
    left: np.ndarray
    right: np.ndarray
    iterations: int
    converged: bool
    residual: float


class _GklState:
    """Incremental driver for the bidiagonalization recurrence."""

    def __init__(self, op: LinearOperator, q1: np.ndarray | None):
        self.op = op
        if q1 is None:
            q1 = np.ones(op.cols) / np.sqrt(op.cols)
        else:
            q1 = np.asarray(q1, dtype=np.float64)
            if q1.shape != (op.cols,):
                raise ValueError("starting vector has wrong length")
            if abs(np.linalg.norm(q1) - 1.0) > 1e-12:
                raise ValueError("starting vector must have unit norm")
        self.reorth_left = op.rows < op.cols
        self.qs = [q1]
        self.ps: list[np.ndarray] = []
        self.alphas: list[float] = []
        self.betas: list[float] = []
        self.scale = 0.0
        self.broke = False
        self.beta_truncated = False

    @property
    def steps(self) -> int:
        return len(self.alphas)

    def _reorth(self, vecs: list[np.ndarray], v: np.ndarray) -> np.ndarray:
        basis = np.column_stack(vecs)
        for _ in range(2):
            v = v - basis @ (basis.T @ v)
        return v

    def _vanished(self, norm: float) -> bool:
        self.scale = max(self.scale, norm)
        return norm <= _BREAKDOWN_RTOL * self.scale

    def step(self) -> bool:
        """Run one recurrence step; False once the Krylov space is exhausted."""
        if self.broke:
            return False
        i = self.steps
        p = self.op.apply(self.qs[i])
        if i > 0:
            p = p - self.betas[i - 1] * self.ps[i - 1]
        if self.reorth_left and self.ps:
            p = self._reorth(self.ps, p)
        alpha = float(np.linalg.norm(p))
        if self._vanished(alpha):
            self.broke = True
            return False
        p /= alpha
        self.ps.append(p)
        self.alphas.append(alpha)
        q = self.op.apply_transpose(p) - alpha * self.qs[i]
        if not self.reorth_left:
            q = self._reorth(self.qs, q)
        beta = float(np.linalg.norm(q))
        if self._vanished(beta):
            self.betas.append(0.0)
            self.broke = True
            self.beta_truncated = True
            return True
        q /= beta
        self.qs.append(q)
        self.betas.append(beta)
        return True

    def factorization(self, requested: int) -> GklFactorization:
        # qs holds steps+1 vectors normally and steps vectors after a beta
        # breakdown (the next right vector does not exist).
        p_mat = np.column_stack(self.ps) if self.ps else np.zeros((self.op.rows, 0))
        q_mat = np.column_stack(self.qs)
        return GklFactorization(
            P=p_mat,
            Q=q_mat,
            alphas=np.asarray(self.alphas),
            betas=np.asarray(self.betas),
            requested=requested,
            breakdown=self.broke,
        )

    def bidiag(self) -> np.ndarray:
        return self.factorization(self.steps).bidiag()


def _check_l(op: LinearOperator, l: int) -> None:
    if not 1 <= l <= min(op.rows, op.cols):
        raise ValueError(f"l must be in [1, min{op.shape}], got {l}")


def gkl_bidiag(op: LinearOperator, l: int, q1=None) -> GklFactorization:
    """Run l bidiagonalization steps, stopping early on breakdown.

    A breakdown (a vanishing recurrence norm relative to the largest one
    seen) shortens the factorization to the steps actually completed rather
    than restarting: for the deflated update blocks it means the whole range
    has been captured and further directions add nothing.
    """
    _check_l(op, l)
    state = _GklState(op, q1)
    for _ in range(l):
        if not state.step():
            break
    return state.factorization(l)


def gkl_partial_svd(
    op: LinearOperator,
    l: int,
    tol: float = 1e-1,
    max_iter: int | None = None,
    q1=None,
) -> PartialSvd:
    """Approximate the l dominant singular triplets of a linear operator.

    Extends the GKL subspace one step at a time; after each step the SVD of
    the small bidiagonal block gives Ritz values, and the solver stops once
    the sum of the top-l values moves by less than tol between consecutive
    steps. Hitting max_iter returns the best available triplets with
    converged=False; a breakdown means the values are exact for the operator.
    """
    _check_l(op, l)
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = min(op.rows, op.cols)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    state = _GklState(op, q1)
    prev_sum = None
    converged = False
    for _ in range(max_iter):
        progressed = state.step()
        if not progressed:
            converged = True
            break
        b = state.bidiag()
        svals = np.linalg.svd(b, compute_uv=False)
        cur_sum = float(np.sum(svals[:l]))
        if state.broke:
            converged = True
            break
        if prev_sum is not None and abs(cur_sum - prev_sum) < tol:
            converged = True
            break
        prev_sum = cur_sum

    fac = state.factorization(l)
    le = fac.effective_l
    if le == 0:
        return PartialSvd(
            values=np.zeros(0),
            left=np.zeros((op.rows, 0)),
            right=np.zeros((op.cols, 0)),
            iterations=0,
            converged=converged,
            residual=0.0,
        )
    phi, svals, psi_t = np.linalg.svd(fac.bidiag(), full_matrices=False)
    r = min(l, len(svals))
    values = svals[:r]
    left = fac.P @ phi[:, :r]
    right = fac.Q @ psi_t[:r].T
    resid = op.apply_matrix(right) - left * values
    return PartialSvd(
        values=values,
        left=left,
        right=right,
        iterations=state.steps,
        converged=converged,
        residual=float(np.linalg.norm(resid)),
    )
