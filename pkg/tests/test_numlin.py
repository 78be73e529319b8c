import numpy as np
import pytest

from centralab.errors import DimensionMismatchError, InvalidMatrixError
from centralab.numlin import (
    OperatorSubspace,
    StackedKernel,
    ToleranceConfig,
    containment_residual,
    hs_inner,
    hs_norm,
    kernel_basis,
    orthonormalize,
    subspace_contains,
    subspace_intersect,
    unvec,
    vec,
)
from helpers import E, crandn, span


class TestHsInner:
    def test_identity(self):
        assert hs_inner(np.eye(2), np.eye(2)) == 2

    def test_disjoint_units(self):
        assert hs_inner(E(1, 1), E(2, 2)) == 0

    def test_unit_norm(self):
        assert hs_inner(E(1, 2), E(1, 2)) == 1
        assert hs_norm(E(1, 2)) == 1

    def test_conjugate_linear_in_second_slot(self):
        X = np.array([[1j, 0], [0, 0]])
        assert hs_inner(X, E(1, 1)) == 1j
        assert hs_inner(E(1, 1), X) == -1j

    def test_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            hs_inner(np.eye(2), np.eye(3))


def test_vec_is_column_stacking(rng):
    A, X, B = crandn(rng, 3, 3), crandn(rng, 3, 3), crandn(rng, 3, 3)
    assert np.allclose(vec(A @ X @ B), np.kron(B.T, A) @ vec(X))
    assert np.array_equal(unvec(vec(X), 3), X)
    assert np.array_equal(vec(np.array([[1, 2], [3, 4]])), [1, 3, 2, 4])


class TestKernelBasis:
    def test_zero_matrix_full_kernel(self):
        assert kernel_basis(np.zeros((4, 4))).shape == (4, 4)

    def test_identity_trivial_kernel(self):
        assert kernel_basis(np.eye(4)).shape == (4, 0)

    def test_diag_one_zero(self):
        K = kernel_basis(np.diag([1.0, 0.0]))
        assert K.shape == (2, 1)
        assert np.isclose(abs(K[1, 0]), 1.0)

    def test_relative_cutoff_is_scale_invariant(self, rng):
        M = crandn(rng, 6, 4) @ crandn(rng, 4, 6)
        for c in (1e-8, 1.0, 1e8):
            assert kernel_basis(c * M).shape[1] == 2

    def test_noise_floor(self):
        # rounding-level noise is not rank once the operator's natural scale is given
        noise = 1e-17 * np.ones((4, 4))
        assert kernel_basis(noise).shape[1] == 3
        assert kernel_basis(noise, scale=1.0).shape[1] == 4

    def test_residual_bound(self, rng):
        tol = ToleranceConfig()
        for _ in range(20):
            M = crandn(rng, 5, 3) @ crandn(rng, 3, 5)
            K = kernel_basis(M, tol)
            smax = np.linalg.norm(M, 2)
            for v in K.T:
                assert np.linalg.norm(M @ v) <= 10 * tol.rank_rel_tol * smax * np.linalg.norm(v)

    def test_non_finite(self):
        with pytest.raises(InvalidMatrixError):
            kernel_basis(np.array([[np.nan, 0], [0, 1]]))

    def test_non_square(self):
        with pytest.raises(InvalidMatrixError):
            kernel_basis(np.zeros((2, 3)))


def test_stacked_kernel_matches_tall_svd(rng):
    blocks = [crandn(rng, 7, 9) for _ in range(3)]
    blocks.append(np.zeros((2, 9)))
    acc = StackedKernel(9, chunk_rows=10)
    for b in blocks[:1]:
        acc.add(b)
    acc.add(blocks[3])
    K = acc.kernel()
    assert K.shape == (9, 2)
    assert np.allclose(blocks[0] @ K, 0, atol=1e-12)
    acc.add(blocks[1])
    assert acc.kernel().shape == (9, 0)


def test_stacked_kernel_rejects_wrong_width():
    with pytest.raises(DimensionMismatchError):
        StackedKernel(4).add(np.zeros((2, 3)))


class TestOrthonormalize:
    def test_collinear(self):
        assert orthonormalize([np.eye(2), 2 * np.eye(2)]).dim == 1

    def test_orthogonal_units(self):
        U = orthonormalize([E(1, 1), E(1, 2)])
        assert U.dim == 2
        G = np.einsum("aij,bij->ab", U.basis.conj(), U.basis)
        assert np.allclose(G, np.eye(2))

    def test_empty(self):
        assert orthonormalize([], n=3).dim == 0
        with pytest.raises(ValueError):
            orthonormalize([])

    def test_idempotent(self, rng):
        U = orthonormalize([crandn(rng, 3, 3) for _ in range(4)])
        V = orthonormalize(list(U.basis))
        G1 = np.einsum("aij,bij->ab", U.basis.conj(), U.basis)
        G2 = np.einsum("aij,bij->ab", V.basis.conj(), V.basis)
        assert np.max(np.abs(G1 - G2)) <= 1e-12
        assert containment_residual(U, V) <= 1e-12

    def test_mixed_sizes(self):
        with pytest.raises(DimensionMismatchError):
            orthonormalize([np.eye(2), np.eye(3)])


class TestIntersect:
    def test_shared_unit(self):
        W = subspace_intersect(span(E(1, 1), E(1, 2)), span(E(1, 1), E(2, 1)))
        assert W.dim == 1
        assert containment_residual(W, span(E(1, 1))) <= 1e-12

    def test_idempotent(self):
        U = span(E(1, 1), E(1, 2))
        assert subspace_intersect(U, U).dim == 2

    def test_orthogonal_lines(self):
        assert subspace_intersect(span(E(1, 1)), span(E(2, 2))).dim == 0

    def test_empty_operand(self):
        assert subspace_intersect(OperatorSubspace.empty(2), OperatorSubspace.full(2)).dim == 0

    def test_grassmann_bound(self, rng):
        for _ in range(10):
            U = orthonormalize([crandn(rng, 2, 2) for _ in range(3)])
            V = orthonormalize([crandn(rng, 2, 2) for _ in range(3)])
            assert subspace_intersect(U, V).dim >= U.dim + V.dim - 4

    def test_ambient_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            subspace_intersect(OperatorSubspace.full(2), OperatorSubspace.full(3))


class TestContains:
    def test_full_contains_identity(self):
        ok, r = subspace_contains(OperatorSubspace.full(2), span(np.eye(2)))
        assert ok and r < 1e-14

    def test_orthogonal_unit(self):
        ok, r = subspace_contains(span(E(1, 1)), span(E(2, 2)))
        assert not ok and np.isclose(r, 1.0)

    def test_reflexive(self):
        U = span(E(1, 1), E(1, 2))
        assert subspace_contains(U, U)[0]

    def test_mutual_means_equal_dim(self, rng):
        U = orthonormalize([crandn(rng, 2, 2) for _ in range(2)])
        V = orthonormalize([U.basis[0] + U.basis[1], U.basis[0] - 2 * U.basis[1]])
        assert subspace_contains(U, V)[0] and subspace_contains(V, U)[0]
        assert U.dim == V.dim

    def test_empty_is_contained(self):
        assert subspace_contains(OperatorSubspace.empty(2), OperatorSubspace.empty(2)) == (True, 0.0)


def test_subspace_vectors_round_trip(rng):
    U = orthonormalize([crandn(rng, 3, 3) for _ in range(2)])
    V = OperatorSubspace.from_vectors(3, U.vectors())
    assert np.array_equal(U.basis, V.basis)
    X = crandn(rng, 3, 3)
    assert np.allclose(unvec(U.projector() @ vec(X), 3), U.project(X))


def test_basis_is_read_only():
    U = OperatorSubspace.full(2)
    with pytest.raises(ValueError):
        U.basis[0, 0, 0] = 5


@pytest.mark.parametrize("field", ["rank_rel_tol", "containment_tol", "zero_tol", "cluster_tol"])
def test_tolerance_validation(field):
    with pytest.raises(ValueError):
        ToleranceConfig(**{field: 0.0})
    with pytest.raises(ValueError):
        ToleranceConfig(**{field: float("nan")})
