import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsiupdate import (
    DeflatedOperator,
    DenseOperator,
    SparseMatrix,
    SparseOperator,
    gkl_bidiag,
    gkl_partial_svd,
    orthonormality_defect,
)
from lsiupdate.operators import adjoint_defect

from conftest import random_orthonormal, random_sparse


def identity_residuals(op, fac):
    """The two residual norms of the coupling identities, Frobenius."""
    m = op.to_dense()
    r1 = np.linalg.norm(m @ fac.Q[:, : fac.effective_l] - fac.P @ fac.square_bidiag())
    r2 = np.linalg.norm(m.T @ fac.P - fac.Q @ fac.bidiag().T)
    return r1, r2


class TestBidiagonalization:
    def test_invariant_subspace_breakdown(self):
        op = DenseOperator(np.diag([3.0, 2.0, 1.0]))
        fac = gkl_bidiag(op, 3, q1=np.array([1.0, 0.0, 0.0]))
        assert fac.breakdown
        assert fac.effective_l == 1
        np.testing.assert_allclose(fac.alphas, [3.0])
        np.testing.assert_allclose(fac.betas, [0.0])
        np.testing.assert_allclose(np.abs(fac.P[:, 0]), [1.0, 0.0, 0.0], atol=1e-15)

    def test_rank_one_breakdown(self):
        op = DenseOperator(np.ones((2, 2)))
        fac = gkl_bidiag(op, 2, q1=np.full(2, 1.0 / np.sqrt(2.0)))
        assert fac.breakdown
        assert fac.effective_l == 1
        np.testing.assert_allclose(fac.alphas, [2.0])

    def test_fundamental_identity(self, rng):
        a = rng.standard_normal((6, 4))
        fac = gkl_bidiag(DenseOperator(a), 4)
        scale = np.linalg.norm(a, 2)
        r1, r2 = identity_residuals(DenseOperator(a), fac)
        assert max(r1, r2) <= 1e-12 * scale

    def test_shapes(self, rng):
        a = rng.standard_normal((10, 7))
        fac = gkl_bidiag(DenseOperator(a), 3)
        assert fac.P.shape == (10, 3)
        assert fac.Q.shape == (7, 4)
        assert fac.bidiag().shape == (3, 4)
        assert fac.square_bidiag().shape == (3, 3)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_reorthogonalized_side_stays_clean(self, seed):
        rng = np.random.default_rng(seed)
        rows, cols = (20, 12) if seed % 2 else (12, 20)
        a = rng.standard_normal((rows, cols))
        l = min(rows, cols)
        fac = gkl_bidiag(DenseOperator(a), l)
        # the shorter side is the one reorthogonalized
        clean = fac.P if rows < cols else fac.Q
        other = fac.Q if rows < cols else fac.P
        assert orthonormality_defect(clean) <= 1e-10
        assert orthonormality_defect(other) <= 1e-6

    def test_bad_start_vector(self):
        op = DenseOperator(np.eye(3))
        with pytest.raises(ValueError, match="unit norm"):
            gkl_bidiag(op, 2, q1=np.array([1.0, 1.0, 0.0]))
        with pytest.raises(ValueError, match="wrong length"):
            gkl_bidiag(op, 2, q1=np.array([1.0, 0.0]))

    def test_l_out_of_range(self):
        op = DenseOperator(np.eye(3))
        with pytest.raises(ValueError, match="l must be"):
            gkl_bidiag(op, 0)
        with pytest.raises(ValueError, match="l must be"):
            gkl_bidiag(op, 4)


class TestPartialSvd:
    def test_diagonal_operator(self):
        op = DenseOperator(np.diag([5.0, 4.0, 3.0, 2.0, 1.0]))
        out = gkl_partial_svd(op, 2, tol=1e-8, max_iter=5)
        assert out.values == pytest.approx([5.0, 4.0], abs=1e-8)

    def test_zero_operator(self):
        op = DenseOperator(np.zeros((4, 3)))
        out = gkl_partial_svd(op, 2)
        assert out.converged
        assert out.iterations == 0
        assert np.all(out.values == 0.0)
        assert out.left.shape == (4, 0)

    def test_annihilated_deflated_core(self, rng):
        basis = random_orthonormal(rng, 8, 3)
        core = SparseMatrix.from_dense(basis @ rng.standard_normal((3, 4)))
        out = gkl_partial_svd(DeflatedOperator(basis, core), 2)
        scale = np.linalg.norm(core.to_dense())
        assert np.all(out.values <= 1e-12 * scale)

    def test_values_below_truth_and_monotone(self, rng):
        a = rng.standard_normal((15, 9))
        truth = np.linalg.svd(a, compute_uv=False)
        prev = None
        for steps in range(1, 10):
            fac = gkl_bidiag(DenseOperator(a), steps)
            vals = np.linalg.svd(fac.bidiag(), compute_uv=False)[:3]
            padded = np.pad(vals, (0, 3 - len(vals)))
            assert np.all(padded <= truth[:3] + 1e-10 * truth[0])
            if prev is not None:
                assert np.all(padded >= prev - 1e-10 * truth[0])
            prev = padded

    def test_max_iter_reached_reports_unconverged(self, rng):
        a = rng.standard_normal((30, 25))
        out = gkl_partial_svd(DenseOperator(a), 3, tol=1e-14, max_iter=4)
        assert not out.converged
        assert out.iterations == 4

    def test_residual_field_matches_recomputation(self, rng):
        a = rng.standard_normal((12, 8))
        out = gkl_partial_svd(DenseOperator(a), 3, tol=1e-10, max_iter=8)
        recomputed = np.linalg.norm(a @ out.right - out.left * out.values)
        assert out.residual == pytest.approx(recomputed, abs=1e-12)

    def test_breakdown_values_exact(self, rng):
        # rank-2 operator: the Krylov space is exhausted early, values exact
        a = rng.standard_normal((10, 2)) @ rng.standard_normal((2, 6))
        truth = np.linalg.svd(a, compute_uv=False)
        out = gkl_partial_svd(DenseOperator(a), 4, tol=1e-12, max_iter=6)
        assert len(out.values) <= 2
        assert out.values == pytest.approx(truth[: len(out.values)], abs=1e-9 * truth[0])


class TestDeflatedOperator:
    def test_output_orthogonal_to_basis(self, rng):
        basis = random_orthonormal(rng, 12, 4)
        core = random_sparse(rng, 12, 6, nonneg=False)
        op = DeflatedOperator(basis, core)
        for _ in range(5):
            x = rng.standard_normal(6)
            assert np.max(np.abs(basis.T @ op.apply(x))) <= 1e-10 * np.linalg.norm(x)

    def test_adjoint_identity(self, rng):
        basis = random_orthonormal(rng, 10, 3)
        core = random_sparse(rng, 7, 10, nonneg=False)
        op = DeflatedOperator(basis, core, transpose_core=True)
        assert op.shape == (10, 7)
        assert adjoint_defect(op, rng) <= 1e-10

    def test_dense_view_matches_definition(self, rng):
        basis = random_orthonormal(rng, 9, 2)
        core = random_sparse(rng, 9, 5, nonneg=False)
        op = DeflatedOperator(basis, core)
        expected = core.to_dense() - basis @ (basis.T @ core.to_dense())
        np.testing.assert_allclose(op.to_dense(), expected, atol=1e-12)

    def test_identity_on_deflated_operators(self, rng):
        basis = random_orthonormal(rng, 14, 3)
        core = random_sparse(rng, 14, 6, nonneg=False)
        op = DeflatedOperator(basis, core)
        fac = gkl_bidiag(op, 5)
        scale = np.linalg.norm(op.to_dense(), 2)
        r1, r2 = identity_residuals(op, fac)
        assert max(r1, r2) <= 1e-10 * scale

    def test_sparse_operator_wraps_kernels(self, rng):
        a = random_sparse(rng, 6, 4, nonneg=False)
        op = SparseOperator(a)
        x = rng.standard_normal(4)
        np.testing.assert_allclose(op.apply(x), a.to_dense() @ x, atol=1e-13)
