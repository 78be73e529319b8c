"""Small shared helpers for the test modules."""

import numpy as np

from centralab.numlin import OperatorSubspace, containment_residual, orthonormalize


def E(i, j, n=2):
    """Matrix unit with a one at (i, j), 1-based."""
    M = np.zeros((n, n), dtype=np.complex128)
    M[i - 1, j - 1] = 1.0
    return M


def span(*mats):
    return orthonormalize(list(mats))


def same_subspace(U: OperatorSubspace, V: OperatorSubspace, tol=1e-8) -> bool:
    return (U.dim == V.dim and containment_residual(U, V) <= tol
            and containment_residual(V, U) <= tol)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
