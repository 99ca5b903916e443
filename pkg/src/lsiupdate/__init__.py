"""Incremental truncated-SVD updating for latent semantic indexing."""

from .evaluation import (
    PrecisionReport,
    mean_avg_precision,
    n_point_avg_precision,
    precision_report,
    relevant_in_top,
    two_proportion_test,
)
from .gkl import GklFactorization, PartialSvd, gkl_bidiag, gkl_partial_svd
from .ingest import (
    TokenizedCorpus,
    WeightingScheme,
    apply_weighting,
    queries_from_terms,
    read_matrix_market,
    read_qrels,
    read_query_lines,
    tokenize_corpus,
    write_matrix_market,
)
from .linalg import dense_svd, is_orthonormal, orthonormality_defect, project_out, thin_qr
from .lsi import ScoringParams, rank, score
from .model import LatentModel, model_from_dense
from .operators import DeflatedOperator, DenseOperator, LinearOperator, SparseOperator
from .sparse import SparseMatrix, matmat, matmat_t, spmv, spmv_t
from .svrr import RitzFactor, rayleigh_quotient, sv_rr
from .update import (
    GKL,
    OB,
    SV,
    ZS,
    AddDocuments,
    AddTerms,
    CorrectWeights,
    SolverOptions,
    UpdateStats,
    parse_policy,
    policy_label,
    update,
    update_add_docs_gkl,
    update_add_docs_sv,
    update_add_docs_zs,
    update_add_terms_gkl,
    update_add_terms_sv,
    update_add_terms_zs,
    update_correct_weights_gkl,
    update_correct_weights_sv,
    update_correct_weights_zs,
)

__all__ = [
    "AddDocuments", "AddTerms", "CorrectWeights", "DeflatedOperator",
    "DenseOperator", "GKL", "GklFactorization", "LatentModel", "LinearOperator",
    "OB", "PartialSvd", "PrecisionReport", "RitzFactor", "SV", "ScoringParams",
    "SolverOptions", "SparseMatrix", "SparseOperator", "TokenizedCorpus",
    "UpdateStats", "WeightingScheme", "ZS", "apply_weighting", "dense_svd",
    "gkl_bidiag", "gkl_partial_svd", "is_orthonormal", "matmat", "matmat_t",
    "mean_avg_precision", "model_from_dense", "n_point_avg_precision",
    "orthonormality_defect", "parse_policy", "policy_label", "precision_report",
    "project_out", "queries_from_terms", "rank", "rayleigh_quotient",
    "read_matrix_market", "read_qrels", "read_query_lines", "relevant_in_top",
    "score", "spmv", "spmv_t", "sv_rr",
    "thin_qr", "tokenize_corpus", "two_proportion_test", "update",
    "update_add_docs_gkl", "update_add_docs_sv", "update_add_docs_zs",
    "update_add_terms_gkl", "update_add_terms_sv", "update_add_terms_zs",
    "update_correct_weights_gkl", "update_correct_weights_sv",
    "update_correct_weights_zs",
]
