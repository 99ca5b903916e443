"""Relevance scoring and ranking against a latent model.

A query q (an m-vector of term weights) is scored against every document via

    r = diag(gamma) (V sigma^(1-alpha)) sigma^alpha U^T q,

where gamma normalizes the rows of V sigma^(1-alpha) to unit length when
enabled. With normalization off the alpha split telescopes away and r reduces
to V diag(sigma) U^T q, so alpha only matters when gamma is active.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import LatentModel
from .sparse import SparseMatrix


@dataclass(frozen=True)
class ScoringParams:
    alpha: float = 0.0
    normalize: bool = True

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


def _query_vector(q, m: int) -> np.ndarray:
    if isinstance(q, SparseMatrix):
        if q.shape == (m, 1):
            return q.column(0)
        raise ValueError(f"query matrix must be {m}x1, got {q.shape}")
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (m,):
        raise ValueError(f"query has {q.shape} entries, model has {m} terms")
    if not np.all(np.isfinite(q)):
        raise ValueError("query contains non-finite entries")
    return q


def score(model: LatentModel, q, params: ScoringParams = ScoringParams()) -> np.ndarray:
    """Relevance scores for all documents; documents with no projection get 0."""
    qv = _query_vector(q, model.terms)
    proj = model.sigma ** params.alpha * (model.U.T @ qv)
    doc_rows = model.V * model.sigma ** (1.0 - params.alpha)
    r = doc_rows @ proj
    if params.normalize:
        norms = np.linalg.norm(doc_rows, axis=1)
        r = np.divide(r, norms, out=np.zeros_like(r), where=norms > 0.0)
    return r


def rank(scores, top: int | None = None) -> np.ndarray:
    """Document indices by descending score; ties break by ascending index."""
    scores = np.asarray(scores, dtype=np.float64)
    n = len(scores)
    if top is None:
        top = n
    if not 0 <= top <= n:
        raise ValueError(f"top must be in [0, {n}]")
    order = np.lexsort((np.arange(n), -scores))
    return order[:top]
