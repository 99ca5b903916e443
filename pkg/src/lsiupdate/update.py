"""Updating algorithms for the rank-k latent model.

Three update types (adding documents, adding terms, correcting term weights),
each available in four flavors that differ only in the left/right search
subspaces handed to the Rayleigh-Ritz extraction:

- zs:  full augmentation by the QR complement of the update block; recovers
       the k dominant triplets of the rank-k-substituted updated matrix
       exactly, at a cost cubic in the batch size p.
- sv:  augmentation by the top-l singular vectors of the deflated update
       block (l << p), computed iteratively or exactly.
- gkl: augmentation by l Golub-Kahan-Lanczos basis vectors of the same
       block; cheaper than sv, slightly less accurate per vector.
- ob:  no augmentation at all (the l = 0 limit); fastest, degrades accuracy.

The updated matrices are never materialized: every scheme assembles its small
projected matrix from blocks computed with sparse products and reads off the
new model from that matrix's dominant triplets.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .gkl import gkl_bidiag, gkl_partial_svd
from .linalg import dense_svd, thin_qr
from .model import LatentModel
from .operators import DeflatedOperator
from .sparse import SparseMatrix, matmat, matmat_t
from .svrr import RitzFactor, ritz_from_projected


# ---------------------------------------------------------------------------
# Batches


@dataclass(frozen=True)
class AddDocuments:
    """Append p new document columns (m-by-p, same vocabulary)."""

    docs: SparseMatrix


@dataclass(frozen=True)
class AddTerms:
    """Append p new term rows (p-by-n, same document collection)."""

    terms: SparseMatrix


@dataclass(frozen=True)
class CorrectWeights:
    """Add C @ W to the matrix: C selects p term rows, W holds the deltas.

    C is m-by-p with each column a distinct standard basis vector; W is
    p-by-n with one row of weight differences per selected term.
    """

    selection: SparseMatrix
    corrections: SparseMatrix

    def __post_init__(self):
        c = self.selection
        if c.cols != self.corrections.rows:
            raise ValueError("selection columns must match correction rows")
        counts = np.diff(c.indptr)
        if np.any(counts != 1) or np.any(c.data != 1.0):
            raise ValueError("selection columns must be standard basis vectors")
        if len(np.unique(c.indices)) != c.cols:
            raise ValueError("selection columns must pick distinct rows")


UpdateBatch = AddDocuments | AddTerms | CorrectWeights


# ---------------------------------------------------------------------------
# Policies


@dataclass(frozen=True)
class SolverOptions:
    """Options for the singular-vector solves inside the sv schemes.

    tol is the stopping threshold on the change of the summed dominant
    values between solver steps; max_iter defaults to the batch size. exact
    switches to a dense SVD of the deflated block (used when the reduced
    scheme must reproduce the full one bit-for-bit in tests).
    """

    tol: float = 1e-1
    max_iter: int | None = None
    exact: bool = False


@dataclass(frozen=True)
class ZS:
    """Full augmentation (exact on the rank-k substitute)."""


@dataclass(frozen=True)
class OB:
    """No augmentation; equivalent to sv/gkl with l = 0."""


@dataclass(frozen=True)
class SV:
    l: int
    l2: int | None = None
    options: SolverOptions = SolverOptions()


@dataclass(frozen=True)
class GKL:
    l: int
    l2: int | None = None


UpdatePolicy = ZS | OB | SV | GKL


def policy_label(policy: UpdatePolicy) -> str:
    if isinstance(policy, ZS):
        return "zs"
    if isinstance(policy, OB):
        return "ob"
    if isinstance(policy, SV):
        return f"sv:l={policy.l}" + (f",l2={policy.l2}" if policy.l2 is not None else "")
    if isinstance(policy, GKL):
        return f"gkl:l={policy.l}" + (f",l2={policy.l2}" if policy.l2 is not None else "")
    raise TypeError(f"unknown policy {policy!r}")


def parse_policy(text: str) -> UpdatePolicy:
    """Parse 'zs', 'ob', 'sv:l=10', 'gkl:l=20' (optionally ',l2=...')."""
    text = text.strip().lower()
    if text == "zs":
        return ZS()
    if text == "ob":
        return OB()
    head, _, args = text.partition(":")
    if head in ("sv", "gkl"):
        fields = {}
        for part in filter(None, args.split(",")):
            key, _, value = part.partition("=")
            if key not in ("l", "l2") or not value:
                raise ValueError(f"bad policy argument {part!r} in {text!r}")
            fields[key] = int(value)
        if "l" not in fields:
            raise ValueError(f"policy {text!r} needs l=<count>")
        if head == "sv":
            return SV(l=fields["l"], l2=fields.get("l2"))
        return GKL(l=fields["l"], l2=fields.get("l2"))
    raise ValueError(f"unknown policy {text!r}")


# ---------------------------------------------------------------------------
# Stats


@dataclass(frozen=True)
class UpdateStats:
    """What one update did: projected-matrix size, reduction ranks, timing."""

    update_type: str
    algorithm: str
    h_rows: int
    h_cols: int
    l_requested: int
    l_effective: int
    l2_requested: int | None = None
    l2_effective: int | None = None
    solver_iterations: int = 0
    breakdown: bool = False
    wall_time_s: float = 0.0


# ---------------------------------------------------------------------------
# Block helpers


def _check_docs(model: LatentModel, d: SparseMatrix) -> None:
    if d.rows != model.terms:
        raise ValueError(f"document block has {d.rows} rows, model has {model.terms}")
    if d.cols < 1:
        raise ValueError("empty update batch")


def _check_terms(model: LatentModel, t: SparseMatrix) -> None:
    if t.cols != model.documents:
        raise ValueError(f"term block has {t.cols} columns, model has {model.documents}")
    if t.rows < 1:
        raise ValueError("empty update batch")


def _check_cw(model: LatentModel, c: SparseMatrix, w: SparseMatrix) -> None:
    if c.rows != model.terms:
        raise ValueError(f"selection has {c.rows} rows, model has {model.terms}")
    if w.cols != model.documents:
        raise ValueError(f"corrections have {w.cols} columns, model has {model.documents}")
    if c.cols < 1:
        raise ValueError("empty update batch")


def _check_l(l: int, p: int, name: str = "l") -> None:
    if not 0 <= l <= p:
        raise ValueError(f"{name} must be in [0, {p}], got {l}")


def _docs_model(model: LatentModel, extra_left: np.ndarray,
                factor: RitzFactor) -> LatentModel:
    """Assemble from left basis [U, Z] and right basis blockdiag(V, I_p)."""
    k = model.k
    u_new = model.U @ factor.F[:k] + extra_left @ factor.F[k:]
    v_new = np.vstack([model.V @ factor.G[:k], factor.G[k:]])
    return LatentModel(sigma=factor.theta, U=u_new, V=v_new)


def _terms_model(model: LatentModel, extra_right: np.ndarray,
                 factor: RitzFactor) -> LatentModel:
    """Assemble from left basis blockdiag(U, I_p) and right basis [V, Z]."""
    k = model.k
    u_new = np.vstack([model.U @ factor.F[:k], factor.F[k:]])
    v_new = model.V @ factor.G[:k] + extra_right @ factor.G[k:]
    return LatentModel(sigma=factor.theta, U=u_new, V=v_new)


def _cw_model(model: LatentModel, extra_left: np.ndarray, extra_right: np.ndarray,
              factor: RitzFactor) -> LatentModel:
    k = model.k
    u_new = model.U @ factor.F[:k] + extra_left @ factor.F[k:]
    v_new = model.V @ factor.G[:k] + extra_right @ factor.G[k:]
    return LatentModel(sigma=factor.theta, U=u_new, V=v_new)


def _docs_h(model: LatentModel, ut_d: np.ndarray, bottom: np.ndarray) -> np.ndarray:
    """[[diag(sigma), U^T D], [0, bottom]] with bottom le-by-p."""
    k, p = model.k, ut_d.shape[1]
    le = bottom.shape[0]
    h = np.zeros((k + le, k + p))
    h[:k, :k] = np.diag(model.sigma)
    h[:k, k:] = ut_d
    h[k:, k:] = bottom
    return h


def _terms_h(model: LatentModel, tv: np.ndarray, right: np.ndarray) -> np.ndarray:
    """[[diag(sigma), 0], [T V, right]] with right p-by-le."""
    k, p = model.k, tv.shape[0]
    le = right.shape[1]
    h = np.zeros((k + p, k + le))
    h[:k, :k] = np.diag(model.sigma)
    h[k:, :k] = tv
    h[k:, k:] = right
    return h


def _cw_h(model: LatentModel, ut_c: np.ndarray, row_block: np.ndarray,
          wv: np.ndarray, col_block: np.ndarray) -> np.ndarray:
    """blockdiag(diag(sigma), 0) + [U^T C; rows] [W V, cols]."""
    k = model.k
    le1, le2 = row_block.shape[0], col_block.shape[1]
    h = np.zeros((k + le1, k + le2))
    h[:k, :k] = np.diag(model.sigma)
    left = np.vstack([ut_c, row_block])
    right = np.hstack([wv, col_block])
    return h + left @ right


def _solve_deflated(op: DeflatedOperator, l: int, options: SolverOptions,
                    default_max_iter: int):
    """Top-l triplets of a deflated block: (values, X, Y, iterations).

    l >= min(op.shape) asks for the whole spectrum, where the iterative
    solver's loose stopping rule has nothing to save; that limit (the full
    scheme) goes through the exact path so it reproduces it bit-for-bit.
    """
    if options.exact or l >= min(op.rows, op.cols):
        s, x, y = dense_svd(op.to_dense())
        r = min(l, len(s))
        return s[:r], x[:, :r], y[:, :r], 0
    max_iter = options.max_iter if options.max_iter is not None else default_max_iter
    psvd = gkl_partial_svd(op, l, tol=options.tol, max_iter=max_iter)
    return psvd.values, psvd.left, psvd.right, psvd.iterations


# ---------------------------------------------------------------------------
# Adding documents


def _add_docs_zs(model: LatentModel, d: SparseMatrix):
    _check_docs(model, d)
    p = d.cols
    ut_d = matmat_t(d, model.U).T
    dproj = d.to_dense() - model.U @ ut_d
    qhat, r = thin_qr(dproj)
    h = _docs_h(model, ut_d, r)
    factor = ritz_from_projected(h, model.k)
    stats = UpdateStats("add_documents", "zs", h.shape[0], h.shape[1],
                        l_requested=p, l_effective=p)
    return _docs_model(model, qhat, factor), stats


def _add_docs_reduced(model: LatentModel, d: SparseMatrix, algorithm: str,
                      basis: np.ndarray, bottom: np.ndarray, l: int,
                      iterations: int):
    p = d.cols
    ut_d = matmat_t(d, model.U).T
    h = _docs_h(model, ut_d, bottom)
    factor = ritz_from_projected(h, model.k)
    le = bottom.shape[0]
    stats = UpdateStats("add_documents", algorithm, h.shape[0], h.shape[1],
                        l_requested=l, l_effective=le,
                        solver_iterations=iterations, breakdown=le < l)
    return _docs_model(model, basis, factor), stats


def _add_docs_ob(model: LatentModel, d: SparseMatrix, algorithm: str = "ob",
                 l: int = 0):
    _check_docs(model, d)
    empty = np.zeros((model.terms, 0))
    return _add_docs_reduced(model, d, algorithm, empty,
                             np.zeros((0, d.cols)), l, 0)


def _add_docs_sv(model: LatentModel, d: SparseMatrix, l: int,
                 options: SolverOptions = SolverOptions()):
    _check_docs(model, d)
    _check_l(l, d.cols)
    if l == 0:
        return _add_docs_ob(model, d, "sv")
    values, x, y, iters = _solve_deflated(
        DeflatedOperator(model.U, d), l, options, default_max_iter=d.cols)
    bottom = values[:, None] * y.T
    return _add_docs_reduced(model, d, "sv", x, bottom, l, iters)


def _add_docs_gkl(model: LatentModel, d: SparseMatrix, l: int):
    _check_docs(model, d)
    _check_l(l, d.cols)
    if l == 0:
        return _add_docs_ob(model, d, "gkl")
    fac = gkl_bidiag(DeflatedOperator(model.U, d), l)
    bottom = fac.bidiag() @ fac.Q.T
    return _add_docs_reduced(model, d, "gkl", fac.P, bottom, l, fac.effective_l)


# ---------------------------------------------------------------------------
# Adding terms


def _add_terms_zs(model: LatentModel, t: SparseMatrix):
    _check_terms(model, t)
    p = t.rows
    tv = matmat(t, model.V)
    tproj = t.to_dense().T - model.V @ tv.T
    vhat, rq = thin_qr(tproj)
    h = _terms_h(model, tv, rq.T)
    factor = ritz_from_projected(h, model.k)
    stats = UpdateStats("add_terms", "zs", h.shape[0], h.shape[1],
                        l_requested=p, l_effective=p)
    return _terms_model(model, vhat, factor), stats


def _add_terms_reduced(model: LatentModel, t: SparseMatrix, algorithm: str,
                       basis: np.ndarray, right: np.ndarray, l: int,
                       iterations: int):
    tv = matmat(t, model.V)
    h = _terms_h(model, tv, right)
    factor = ritz_from_projected(h, model.k)
    le = right.shape[1]
    stats = UpdateStats("add_terms", algorithm, h.shape[0], h.shape[1],
                        l_requested=l, l_effective=le,
                        solver_iterations=iterations, breakdown=le < l)
    return _terms_model(model, basis, factor), stats


def _add_terms_ob(model: LatentModel, t: SparseMatrix, algorithm: str = "ob",
                  l: int = 0):
    _check_terms(model, t)
    empty = np.zeros((model.documents, 0))
    return _add_terms_reduced(model, t, algorithm, empty,
                              np.zeros((t.rows, 0)), l, 0)


def _add_terms_sv(model: LatentModel, t: SparseMatrix, l: int,
                  options: SolverOptions = SolverOptions()):
    _check_terms(model, t)
    _check_l(l, t.rows)
    if l == 0:
        return _add_terms_ob(model, t, "sv")
    values, x, y, iters = _solve_deflated(
        DeflatedOperator(model.V, t, transpose_core=True), l, options,
        default_max_iter=t.rows)
    return _add_terms_reduced(model, t, "sv", x, y * values, l, iters)


def _add_terms_gkl(model: LatentModel, t: SparseMatrix, l: int):
    _check_terms(model, t)
    _check_l(l, t.rows)
    if l == 0:
        return _add_terms_ob(model, t, "gkl")
    fac = gkl_bidiag(DeflatedOperator(model.V, t, transpose_core=True), l)
    right = fac.Q @ fac.bidiag().T
    return _add_terms_reduced(model, t, "gkl", fac.P, right, l, fac.effective_l)


# ---------------------------------------------------------------------------
# Correcting weights


def _cw_blocks(model: LatentModel, c: SparseMatrix, w: SparseMatrix):
    ut_c = matmat_t(c, model.U).T
    wv = matmat(w, model.V)
    return ut_c, wv


def _correct_weights_zs(model: LatentModel, c: SparseMatrix, w: SparseMatrix):
    _check_cw(model, c, w)
    ut_c, wv = _cw_blocks(model, c, w)
    cproj = c.to_dense() - model.U @ ut_c
    uhat, r = thin_qr(cproj)
    wproj = w.to_dense().T - model.V @ wv.T
    vhat, rq = thin_qr(wproj)
    h = _cw_h(model, ut_c, r, wv, rq.T)
    factor = ritz_from_projected(h, model.k)
    p = c.cols
    stats = UpdateStats("correct_weights", "zs", h.shape[0], h.shape[1],
                        l_requested=p, l_effective=p,
                        l2_requested=p, l2_effective=p)
    return _cw_model(model, uhat, vhat, factor), stats


def _correct_weights_reduced(model: LatentModel, c: SparseMatrix, w: SparseMatrix,
                             algorithm: str, l1: int, l2: int,
                             left_solve, right_solve):
    """Shared sv/gkl weight-correction path; *_solve return (basis, block, iters)."""
    _check_cw(model, c, w)
    p = c.cols
    _check_l(l1, p, "l1")
    _check_l(l2, p, "l2")
    ut_c, wv = _cw_blocks(model, c, w)
    if l1 > 0:
        basis1, row_block, it1 = left_solve(DeflatedOperator(model.U, c), l1)
    else:
        basis1, row_block, it1 = np.zeros((model.terms, 0)), np.zeros((0, p)), 0
    if l2 > 0:
        basis2, col_block, it2 = right_solve(
            DeflatedOperator(model.V, w, transpose_core=True), l2)
    else:
        basis2, col_block, it2 = np.zeros((model.documents, 0)), np.zeros((p, 0)), 0
    h = _cw_h(model, ut_c, row_block, wv, col_block)
    factor = ritz_from_projected(h, model.k)
    le1, le2 = row_block.shape[0], col_block.shape[1]
    stats = UpdateStats("correct_weights", algorithm, h.shape[0], h.shape[1],
                        l_requested=l1, l_effective=le1,
                        l2_requested=l2, l2_effective=le2,
                        solver_iterations=it1 + it2,
                        breakdown=le1 < l1 or le2 < l2)
    return _cw_model(model, basis1, basis2, factor), stats


def _correct_weights_sv(model: LatentModel, c: SparseMatrix, w: SparseMatrix,
                        l1: int, l2: int,
                        options: SolverOptions = SolverOptions()):
    def left(op, l):
        values, x, y, iters = _solve_deflated(op, l, options, op.cols)
        return x, values[:, None] * y.T, iters

    def right(op, l):
        values, x, y, iters = _solve_deflated(op, l, options, op.cols)
        return x, y * values, iters

    algorithm = "sv" if (l1 > 0 or l2 > 0) else "ob"
    return _correct_weights_reduced(model, c, w, algorithm, l1, l2, left, right)


def _correct_weights_gkl(model: LatentModel, c: SparseMatrix, w: SparseMatrix,
                         l1: int, l2: int):
    def left(op, l):
        fac = gkl_bidiag(op, l)
        return fac.P, fac.bidiag() @ fac.Q.T, fac.effective_l

    def right(op, l):
        fac = gkl_bidiag(op, l)
        return fac.P, fac.Q @ fac.bidiag().T, fac.effective_l

    algorithm = "gkl" if (l1 > 0 or l2 > 0) else "ob"
    return _correct_weights_reduced(model, c, w, algorithm, l1, l2, left, right)


# ---------------------------------------------------------------------------
# Public surface


def update_add_docs_zs(model: LatentModel, d: SparseMatrix) -> LatentModel:
    return _add_docs_zs(model, d)[0]


def update_add_terms_zs(model: LatentModel, t: SparseMatrix) -> LatentModel:
    return _add_terms_zs(model, t)[0]


def update_correct_weights_zs(model: LatentModel, c: SparseMatrix,
                              w: SparseMatrix) -> LatentModel:
    return _correct_weights_zs(model, c, w)[0]


def update_add_docs_sv(model: LatentModel, d: SparseMatrix, l: int,
                       options: SolverOptions = SolverOptions()) -> LatentModel:
    return _add_docs_sv(model, d, l, options)[0]


def update_add_terms_sv(model: LatentModel, t: SparseMatrix, l: int,
                        options: SolverOptions = SolverOptions()) -> LatentModel:
    return _add_terms_sv(model, t, l, options)[0]


def update_correct_weights_sv(model: LatentModel, c: SparseMatrix, w: SparseMatrix,
                              l1: int, l2: int,
                              options: SolverOptions = SolverOptions()) -> LatentModel:
    return _correct_weights_sv(model, c, w, l1, l2, options)[0]


def update_add_docs_gkl(model: LatentModel, d: SparseMatrix, l: int) -> LatentModel:
    return _add_docs_gkl(model, d, l)[0]


def update_add_terms_gkl(model: LatentModel, t: SparseMatrix, l: int) -> LatentModel:
    return _add_terms_gkl(model, t, l)[0]


def update_correct_weights_gkl(model: LatentModel, c: SparseMatrix, w: SparseMatrix,
                               l1: int, l2: int) -> LatentModel:
    return _correct_weights_gkl(model, c, w, l1, l2)[0]


def _dispatch(model: LatentModel, batch: UpdateBatch, policy: UpdatePolicy):
    if isinstance(batch, AddDocuments):
        if isinstance(policy, ZS):
            return _add_docs_zs(model, batch.docs)
        if isinstance(policy, OB):
            return _add_docs_ob(model, batch.docs)
        if isinstance(policy, SV):
            return _add_docs_sv(model, batch.docs, policy.l, policy.options)
        if isinstance(policy, GKL):
            return _add_docs_gkl(model, batch.docs, policy.l)
    elif isinstance(batch, AddTerms):
        if isinstance(policy, ZS):
            return _add_terms_zs(model, batch.terms)
        if isinstance(policy, OB):
            return _add_terms_ob(model, batch.terms)
        if isinstance(policy, SV):
            return _add_terms_sv(model, batch.terms, policy.l, policy.options)
        if isinstance(policy, GKL):
            return _add_terms_gkl(model, batch.terms, policy.l)
    elif isinstance(batch, CorrectWeights):
        c, w = batch.selection, batch.corrections
        if isinstance(policy, ZS):
            return _correct_weights_zs(model, c, w)
        if isinstance(policy, OB):
            return _correct_weights_sv(model, c, w, 0, 0)
        if isinstance(policy, SV):
            return _correct_weights_sv(model, c, w, policy.l,
                                       policy.l2 if policy.l2 is not None else policy.l,
                                       policy.options)
        if isinstance(policy, GKL):
            return _correct_weights_gkl(model, c, w, policy.l,
                                        policy.l2 if policy.l2 is not None else policy.l)
    raise TypeError(f"unsupported batch/policy pair: {type(batch).__name__}, "
                    f"{type(policy).__name__}")


def update(model: LatentModel, batch: UpdateBatch, policy: UpdatePolicy,
           clock=time.perf_counter) -> tuple[LatentModel, UpdateStats]:
    """Apply one update under the given policy; returns the new model and stats.

    The clock is injectable so benchmark runs can be made byte-reproducible;
    only the update computation itself is timed.
    """
    t0 = clock()
    new_model, stats = _dispatch(model, batch, policy)
    elapsed = clock() - t0
    return new_model, replace(stats, wall_time_s=elapsed)
