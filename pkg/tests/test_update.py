import numpy as np
import pytest

from lsiupdate import (
    GKL,
    OB,
    SV,
    AddDocuments,
    AddTerms,
    CorrectWeights,
    LatentModel,
    SolverOptions,
    SparseMatrix,
    parse_policy,
    policy_label,
    sv_rr,
    update,
    update_add_docs_gkl,
    update_add_docs_sv,
    update_add_docs_zs,
    update_add_terms_sv,
    update_add_terms_zs,
    update_correct_weights_sv,
    update_correct_weights_zs,
    ZS,
)

from conftest import random_model, random_sparse, selection_matrix

EXACT = SolverOptions(exact=True)


def docs_oracle(model, d_dense, k):
    return np.linalg.svd(np.hstack([model.reconstruct(), d_dense]),
                         compute_uv=False)[:k]


def terms_oracle(model, t_dense, k):
    return np.linalg.svd(np.vstack([model.reconstruct(), t_dense]),
                         compute_uv=False)[:k]


def cw_oracle(model, c_dense, w_dense, k):
    return np.linalg.svd(model.reconstruct() + c_dense @ w_dense,
                         compute_uv=False)[:k]


class TestFullAugmentationUpdates:
    def test_zero_documents_leave_values_unchanged(self, rng):
        model, _ = random_model(rng, 12, 10, 3)
        zeros = SparseMatrix.from_coo(12, 4, [], [], [])
        out = update_add_docs_zs(model, zeros)
        assert out.sigma == pytest.approx(model.sigma, abs=1e-12)
        assert out.documents == 14
        assert np.max(np.abs(out.V[10:])) <= 1e-12

    def test_docs_match_oracle(self, rng):
        model, _ = random_model(rng, 15, 12, 4)
        d = random_sparse(rng, 15, 5)
        out = update_add_docs_zs(model, d)
        oracle = docs_oracle(model, d.to_dense(), 4)
        assert out.sigma == pytest.approx(oracle, abs=1e-10 * oracle[0])
        out.validate(1e-10)

    def test_single_document(self, rng):
        model, _ = random_model(rng, 10, 8, 3)
        d = random_sparse(rng, 10, 1, density=0.6)
        out = update_add_docs_zs(model, d)
        assert out.sigma == pytest.approx(docs_oracle(model, d.to_dense(), 3),
                                          abs=1e-10)

    def test_zero_terms_leave_values_unchanged(self, rng):
        model, _ = random_model(rng, 12, 10, 3)
        zeros = SparseMatrix.from_coo(4, 10, [], [], [])
        out = update_add_terms_zs(model, zeros)
        assert out.sigma == pytest.approx(model.sigma, abs=1e-12)
        assert out.terms == 16
        assert np.max(np.abs(out.U[12:])) <= 1e-12

    def test_terms_match_oracle(self, rng):
        model, _ = random_model(rng, 14, 11, 4)
        t = random_sparse(rng, 3, 11)
        out = update_add_terms_zs(model, t)
        oracle = terms_oracle(model, t.to_dense(), 4)
        assert out.sigma == pytest.approx(oracle, abs=1e-10 * oracle[0])
        out.validate(1e-10)

    def test_terms_docs_duality(self, rng):
        model, _ = random_model(rng, 14, 11, 4)
        t = random_sparse(rng, 3, 11)
        via_terms = update_add_terms_zs(model, t)
        swapped = LatentModel(sigma=model.sigma, U=model.V, V=model.U)
        via_docs = update_add_docs_zs(swapped, t.transpose())
        assert via_terms.sigma == pytest.approx(via_docs.sigma, abs=1e-11)
        np.testing.assert_allclose(np.abs(via_terms.U), np.abs(via_docs.V), atol=1e-9)

    def test_weights_zero_corrections_noop(self, rng):
        model, _ = random_model(rng, 12, 10, 3)
        c = selection_matrix(rng, 12, 3)
        w = SparseMatrix.from_coo(3, 10, [], [], [])
        out = update_correct_weights_zs(model, c, w)
        assert out.sigma == pytest.approx(model.sigma, abs=1e-12)

    def test_weights_match_oracle(self, rng):
        model, _ = random_model(rng, 13, 11, 4)
        c = selection_matrix(rng, 13, 4)
        w = random_sparse(rng, 4, 11, nonneg=False, density=0.5)
        out = update_correct_weights_zs(model, c, w)
        oracle = cw_oracle(model, c.to_dense(), w.to_dense(), 4)
        assert out.sigma == pytest.approx(oracle, abs=1e-10 * max(1.0, oracle[0]))
        out.validate(1e-10)

    def test_weights_zeroing_selected_rows(self, rng):
        model, _ = random_model(rng, 12, 9, 3)
        rows = np.array([1, 5])
        c = SparseMatrix.from_coo(12, 2, rows, [0, 1], np.ones(2))
        # corrections that zero the selected rows of the rank-k matrix
        w = SparseMatrix.from_dense(-model.reconstruct()[rows])
        out = update_correct_weights_zs(model, c, w)
        oracle = cw_oracle(model, c.to_dense(), w.to_dense(), 3)
        assert out.sigma == pytest.approx(oracle, abs=1e-10 * max(1.0, oracle[0]))


class TestReducedSchemes:
    def test_sv_full_rank_matches_zs_docs(self, rng):
        model, _ = random_model(rng, 16, 12, 4)
        d = random_sparse(rng, 16, 6)
        zs = update_add_docs_zs(model, d)
        sv = update_add_docs_sv(model, d, 6, EXACT)
        assert sv.sigma == pytest.approx(zs.sigma, abs=1e-10 * zs.sigma[0])

    def test_sv_zero_is_ob_baseline(self, rng):
        model, _ = random_model(rng, 16, 12, 4)
        d = random_sparse(rng, 16, 6)
        sv0 = update_add_docs_sv(model, d, 0)
        right = np.block([[model.V, np.zeros((12, 6))], [np.zeros((6, 4)), np.eye(6)]])
        a_d = np.hstack([model.reconstruct(), d.to_dense()])
        _, baseline = sv_rr(a_d, model.U, right, 4)
        assert sv0.sigma == pytest.approx(baseline.sigma, abs=1e-12)

    def test_docs_in_span_collapse_to_ob(self, rng):
        model, _ = random_model(rng, 16, 12, 4)
        d = SparseMatrix.from_dense(model.U @ rng.standard_normal((4, 5)))
        for l in (1, 3):
            out, stats = update(model, AddDocuments(d), SV(l=l))
            base = update_add_docs_sv(model, d, 0)
            assert out.sigma == pytest.approx(base.sigma, abs=1e-9 * model.sigma[0])

    def test_sv_terms_matches_zs_at_full_rank(self, rng):
        model, _ = random_model(rng, 14, 11, 4)
        t = random_sparse(rng, 5, 11)
        zs = update_add_terms_zs(model, t)
        sv = update_add_terms_sv(model, t, 5, EXACT)
        assert sv.sigma == pytest.approx(zs.sigma, abs=1e-10 * zs.sigma[0])

    def test_sv_weights_matches_zs_at_full_rank(self, rng):
        model, _ = random_model(rng, 13, 11, 4)
        c = selection_matrix(rng, 13, 4)
        w = random_sparse(rng, 4, 11, nonneg=False, density=0.5)
        zs = update_correct_weights_zs(model, c, w)
        sv = update_correct_weights_sv(model, c, w, 4, 4, EXACT)
        assert sv.sigma == pytest.approx(zs.sigma, abs=1e-10 * max(1.0, zs.sigma[0]))

    def test_weights_l_zero_is_plain_projection(self, rng):
        model, _ = random_model(rng, 13, 11, 4)
        c = selection_matrix(rng, 13, 4)
        w = random_sparse(rng, 4, 11, nonneg=False, density=0.5)
        out = update_correct_weights_sv(model, c, w, 0, 0)
        a_cw = model.reconstruct() + c.to_dense() @ w.to_dense()
        _, baseline = sv_rr(a_cw, model.U, model.V, 4)
        assert out.sigma == pytest.approx(baseline.sigma, abs=1e-12)

    def test_terms_l_zero_is_restricted_projection(self, rng):
        model, _ = random_model(rng, 14, 11, 4)
        t = random_sparse(rng, 5, 11)
        out = update_add_terms_sv(model, t, 0)
        left = np.block([[model.U, np.zeros((14, 5))], [np.zeros((5, 4)), np.eye(5)]])
        a_t = np.vstack([model.reconstruct(), t.to_dense()])
        _, baseline = sv_rr(a_t, left, model.V, 4)
        assert out.sigma == pytest.approx(baseline.sigma, abs=1e-12)

    def test_gkl_full_steps_match_zs(self, rng):
        model, _ = random_model(rng, 16, 12, 4)
        d = random_sparse(rng, 16, 6)
        zs = update_add_docs_zs(model, d)
        gkl = update_add_docs_gkl(model, d, 6)
        assert gkl.sigma == pytest.approx(zs.sigma, abs=1e-10 * zs.sigma[0])

    def test_gkl_breakdown_matches_sv_on_captured_span(self, rng):
        model, _ = random_model(rng, 16, 12, 4)
        low_rank = rng.standard_normal((16, 2)) @ rng.standard_normal((2, 7))
        d = SparseMatrix.from_dense(low_rank)
        out, stats = update(model, AddDocuments(d), GKL(l=5))
        assert stats.breakdown
        le = stats.l_effective
        assert le < 5
        sv = update_add_docs_sv(model, d, le, EXACT)
        assert out.sigma == pytest.approx(sv.sigma, abs=1e-9 * out.sigma[0])

    def test_monotone_in_l_and_bounded_by_zs(self, rng):
        model, _ = random_model(rng, 16, 12, 4)
        d = random_sparse(rng, 16, 6)
        zs = update_add_docs_zs(model, d)
        scale = zs.sigma[0]
        for flavor in ("sv", "gkl"):
            prev = None
            for l in range(0, 7):
                if flavor == "sv":
                    out = update_add_docs_sv(model, d, l, EXACT)
                else:
                    out = update_add_docs_gkl(model, d, l)
                assert np.all(out.sigma <= zs.sigma + 1e-10 * scale)
                if prev is not None:
                    assert np.all(out.sigma >= prev - 1e-10 * scale)
                prev = out.sigma

    def test_l_out_of_range_rejected(self, rng):
        model, _ = random_model(rng, 10, 8, 3)
        d = random_sparse(rng, 10, 4)
        with pytest.raises(ValueError, match="l must be"):
            update_add_docs_sv(model, d, 5)


class TestDispatcher:
    def test_projected_matrix_shapes(self, rng):
        model, _ = random_model(rng, 20, 15, 5)
        k, p, l = 5, 6, 2
        d = random_sparse(rng, 20, p)
        t = random_sparse(rng, p, 15)
        c = selection_matrix(rng, 20, p)
        w = random_sparse(rng, p, 15, nonneg=False)
        cases = [
            (AddDocuments(d), ZS(), (k + p, k + p)),
            (AddDocuments(d), SV(l=l), (k + l, k + p)),
            (AddDocuments(d), GKL(l=l), (k + l, k + p)),
            (AddDocuments(d), OB(), (k, k + p)),
            (AddTerms(t), ZS(), (k + p, k + p)),
            (AddTerms(t), SV(l=l), (k + p, k + l)),
            (AddTerms(t), GKL(l=l), (k + p, k + l)),
            (AddTerms(t), OB(), (k + p, k)),
            (CorrectWeights(c, w), ZS(), (k + p, k + p)),
            (CorrectWeights(c, w), SV(l=2, l2=3), (k + 2, k + 3)),
            (CorrectWeights(c, w), GKL(l=2, l2=3), (k + 2, k + 3)),
            (CorrectWeights(c, w), OB(), (k, k)),
        ]
        for batch, policy, expected in cases:
            _, stats = update(model, batch, policy)
            assert (stats.h_rows, stats.h_cols) == expected, policy

    def test_stats_record_effective_reduction(self, rng):
        model, _ = random_model(rng, 20, 15, 5)
        d = random_sparse(rng, 20, 6)
        _, stats = update(model, AddDocuments(d), ZS())
        assert stats.l_effective == 6
        _, stats = update(model, AddDocuments(d), OB())
        assert stats.l_effective == 0
        _, stats = update(model, AddDocuments(d), GKL(l=3))
        assert stats.l_requested == 3 and stats.l_effective == 3

    def test_wall_time_uses_injected_clock(self, rng):
        model, _ = random_model(rng, 10, 8, 3)
        d = random_sparse(rng, 10, 3)
        ticks = iter(range(100))
        _, stats = update(model, AddDocuments(d), ZS(), clock=lambda: float(next(ticks)))
        assert stats.wall_time_s == 1.0

    def test_orthonormality_over_chained_updates(self, rng):
        model, _ = random_model(rng, 40, 30, 5)
        for i in range(100):
            kind = i % 3
            if kind == 0:
                batch = AddDocuments(random_sparse(rng, model.terms, 3))
            elif kind == 1:
                batch = AddTerms(random_sparse(rng, 3, model.documents))
            else:
                c = selection_matrix(rng, model.terms, 3)
                w = random_sparse(rng, 3, model.documents, nonneg=False)
                batch = CorrectWeights(c, w)
            policy = (ZS(), SV(l=2), GKL(l=2))[i % 3] if i % 2 else ZS()
            model, _ = update(model, batch, policy)
        model.validate(1e-9)

    def test_batch_dimension_mismatch(self, rng):
        model, _ = random_model(rng, 10, 8, 3)
        with pytest.raises(ValueError, match="rows"):
            update(model, AddDocuments(random_sparse(rng, 9, 3)), ZS())
        with pytest.raises(ValueError, match="columns"):
            update(model, AddTerms(random_sparse(rng, 3, 7)), ZS())


class TestBatchValidation:
    def test_selection_must_be_basis_vectors(self, rng):
        w = random_sparse(rng, 2, 6)
        bad_value = SparseMatrix.from_coo(8, 2, [0, 1], [0, 1], [1.0, 2.0])
        with pytest.raises(ValueError, match="standard basis"):
            CorrectWeights(bad_value, w)
        two_entries = SparseMatrix.from_coo(8, 2, [0, 1, 2], [0, 0, 1], [1.0, 1.0, 1.0])
        with pytest.raises(ValueError, match="standard basis"):
            CorrectWeights(two_entries, w)
        repeated_row = SparseMatrix.from_coo(8, 2, [3, 3], [0, 1], [1.0, 1.0])
        with pytest.raises(ValueError, match="distinct"):
            CorrectWeights(repeated_row, w)

    def test_selection_correction_shape_mismatch(self, rng):
        c = selection_matrix(rng, 8, 2)
        with pytest.raises(ValueError, match="match"):
            CorrectWeights(c, random_sparse(rng, 3, 6))


class TestPolicyStrings:
    @pytest.mark.parametrize("text,expected", [
        ("zs", ZS()),
        ("ob", OB()),
        ("sv:l=10", SV(l=10)),
        ("gkl:l=20", GKL(l=20)),
        ("sv:l=2,l2=4", SV(l=2, l2=4)),
        ("GKL:L=3", GKL(l=3)),
    ])
    def test_parse(self, text, expected):
        assert parse_policy(text) == expected

    def test_round_trip(self):
        for text in ("zs", "ob", "sv:l=10", "gkl:l=20", "sv:l=2,l2=4"):
            assert policy_label(parse_policy(text)) == text

    @pytest.mark.parametrize("bad", ["", "zs:l=2x", "sv", "sv:l=", "gkl:m=3", "foo"])
    def test_parse_errors(self, bad):
        with pytest.raises(ValueError):
            parse_policy(bad)
