"""Dense complex linear algebra on matrix space.

Matrices are identified with vectors in C^(n^2) by column stacking,
``vec(X) = X.reshape(-1, order="F")``, so that

    vec(A @ X @ B) == kron(B.T, A) @ vec(X).

Every subspace of matrix space is stored as a Hilbert-Schmidt orthonormal
basis, with ``<X, Y> = trace(Y^* X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, InvalidMatrixError

ComplexMatrix = np.ndarray


@dataclass(frozen=True)
class ToleranceConfig:
    rank_rel_tol: float = 1e-10
    containment_tol: float = 1e-7
    zero_tol: float = 1e-9
    cluster_tol: float = 1e-7

    def __post_init__(self):
        for name in ("rank_rel_tol", "containment_tol", "zero_tol", "cluster_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")

    def as_dict(self) -> dict:
        return {
            "rank_rel_tol": self.rank_rel_tol,
            "containment_tol": self.containment_tol,
            "zero_tol": self.zero_tol,
            "cluster_tol": self.cluster_tol,
        }


DEFAULT_TOL = ToleranceConfig()


def as_matrix(A, name: str = "matrix") -> ComplexMatrix:
    """Validate and convert ``A`` to a square complex128 array."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise InvalidMatrixError(f"{name} must be a nonempty square matrix, got shape {A.shape}")
    A = A.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(A)):
        raise InvalidMatrixError(f"{name} has non-finite entries")
    return A


def vec(X: ComplexMatrix) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int) -> ComplexMatrix:
    return np.asarray(v).reshape((n, n), order="F")


def _same_dim(X, Y):
    if X.shape != Y.shape:
        raise DimensionMismatchError(f"shape mismatch: {X.shape} vs {Y.shape}")


def hs_inner(X, Y) -> complex:
    """Hilbert-Schmidt pairing trace(Y^* X)."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    _same_dim(X, Y)
    return complex(np.vdot(Y, X))


def hs_norm(X) -> float:
    return float(np.linalg.norm(X))


@dataclass(frozen=True, eq=False)
class OperatorSubspace:
    """A linear subspace of n x n matrices with an HS-orthonormal basis.

    ``basis`` has shape ``(dim, n, n)``; a zero-dimensional subspace is a
    valid value with an empty basis array.
    """

    n: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128)
        if b.size == 0:
            b = np.zeros((0, self.n, self.n), dtype=np.complex128)
        if b.ndim != 3 or b.shape[1:] != (self.n, self.n):
            raise DimensionMismatchError(
                f"basis must have shape (d, {self.n}, {self.n}), got {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.basis)

    def vectors(self) -> np.ndarray:
        """Basis as columns of an (n^2, dim) array of vec'd matrices."""
        return np.swapaxes(self.basis, 1, 2).reshape(self.dim, self.n * self.n).T

    @classmethod
    def from_vectors(cls, n: int, V: np.ndarray) -> "OperatorSubspace":
        V = np.asarray(V)
        d = V.shape[1] if V.ndim == 2 else 0
        basis = np.swapaxes(V.T.reshape(d, n, n), 1, 2) if d else np.zeros((0, n, n))
        return cls(n, np.ascontiguousarray(basis))

    @classmethod
    def full(cls, n: int) -> "OperatorSubspace":
        return cls.from_vectors(n, np.eye(n * n, dtype=np.complex128))

    @classmethod
    def empty(cls, n: int) -> "OperatorSubspace":
        return cls(n, np.zeros((0, n, n), dtype=np.complex128))

    def projector(self) -> np.ndarray:
        V = self.vectors()
        return V @ V.conj().T

    def project(self, X) -> ComplexMatrix:
        """Orthogonal projection of the matrix X onto the subspace."""
        X = np.asarray(X, dtype=np.complex128)
        _same_dim(X, np.empty((self.n, self.n)))
        coeffs = np.einsum("dij,ij->d", self.basis.conj(), X)
        return np.einsum("d,dij->ij", coeffs, self.basis)


def _null_space_from_svd(M: np.ndarray, rel_tol: float, scale: float = 0.0) -> np.ndarray:
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=np.complex128)
    _, s, vh = scipy.linalg.svd(M, full_matrices=True, lapack_driver="gesvd")
    ref = max(s[0] if s.size else 0.0, scale)
    if ref == 0.0:
        return np.eye(ncols, dtype=np.complex128)
    rank = int(np.count_nonzero(s > rel_tol * ref))
    return vh[rank:].conj().T


def kernel_basis(M, tol: ToleranceConfig = DEFAULT_TOL, scale: float = 0.0):
    """Orthonormal basis of the numerical null space of M.

    Singular directions with sigma <= rank_rel_tol * max(sigma_max, scale)
    belong to the kernel; a zero matrix has full kernel.  ``scale`` is the
    natural size of the operator (e.g. ||A||^s for ad_A^s) and keeps an
    operator made only of rounding noise from looking injective.  A
    ``LiftedOperator`` yields an ``OperatorSubspace``; a plain array yields
    kernel vectors as columns.
    """
    lifted_n = getattr(M, "n", None)
    mat = getattr(M, "mat", M)
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidMatrixError(f"kernel_basis expects a square matrix, got {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise InvalidMatrixError("kernel_basis: non-finite entries")
    K = _null_space_from_svd(mat, tol.rank_rel_tol, scale)
    if lifted_n is not None:
        return OperatorSubspace.from_vectors(lifted_n, K)
    return K


class StackedKernel:
    """Joint null space of many constraint blocks sharing one column space.

    Blocks are folded into a triangular factor with Householder QR as they
    arrive, so memory stays O(ncols^2) however many blocks are stacked; the
    singular values of the factor equal those of the full tall stack.
    """

    def __init__(self, ncols: int, chunk_rows: int | None = None):
        self.ncols = ncols
        self._R = np.zeros((0, ncols), dtype=np.complex128)
        self._pending: list[np.ndarray] = []
        self._pending_rows = 0
        self._chunk_rows = chunk_rows or max(8 * ncols, 256)

    def add(self, block: np.ndarray):
        block = np.asarray(block, dtype=np.complex128)
        if block.ndim != 2 or block.shape[1] != self.ncols:
            raise DimensionMismatchError(
                f"constraint block must have {self.ncols} columns, got {block.shape}")
        self._pending.append(block)
        self._pending_rows += block.shape[0]
        if self._pending_rows >= self._chunk_rows:
            self._fold()

    def _fold(self):
        if not self._pending:
            return
        stack = np.vstack([self._R, *self._pending])
        self._pending = []
        self._pending_rows = 0
        if not np.all(np.isfinite(stack)):
            raise InvalidMatrixError("constraint blocks contain non-finite entries")
        if stack.shape[0] <= self.ncols:
            self._R = stack
        else:
            self._R = scipy.linalg.qr(stack, mode="r")[0][: self.ncols]

    def factor(self) -> np.ndarray:
        self._fold()
        return self._R

    def kernel(self, tol: ToleranceConfig = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
        return _null_space_from_svd(self.factor(), tol.rank_rel_tol, scale)


def _check_ambient(U: OperatorSubspace, V: OperatorSubspace):
    if U.n != V.n:
        raise DimensionMismatchError(f"ambient dimensions differ: {U.n} vs {V.n}")


def orthonormalize(mats: Iterable, tol: ToleranceConfig = DEFAULT_TOL,
                   n: int | None = None) -> OperatorSubspace:
    """HS-orthonormal basis of span(mats), via SVD of the stacked vec'd inputs."""
    mats = [np.asarray(X, dtype=np.complex128) for X in mats]
    if not mats:
        if n is None:
            raise ValueError("orthonormalize of an empty list needs the ambient n")
        return OperatorSubspace.empty(n)
    n0 = mats[0].shape[0]
    for X in mats:
        if X.shape != (n0, n0):
            raise DimensionMismatchError(f"expected {n0}x{n0} matrices, got {X.shape}")
    if n is not None and n != n0:
        raise DimensionMismatchError(f"expected ambient n={n}, got {n0}")
    V = np.stack([vec(X) for X in mats], axis=1)
    if not np.all(np.isfinite(V)):
        raise InvalidMatrixError("orthonormalize: non-finite entries")
    u, s, _ = scipy.linalg.svd(V, full_matrices=False, lapack_driver="gesvd")
    if s.size == 0 or s[0] == 0.0:
        return OperatorSubspace.empty(n0)
    rank = int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))
    return OperatorSubspace.from_vectors(n0, u[:, :rank])


def subspace_intersect(U: OperatorSubspace, V: OperatorSubspace,
                       tol: ToleranceConfig = DEFAULT_TOL) -> OperatorSubspace:
    """U ∩ V as the joint null space of the two complement projectors.

    A direction counts as shared when its combined distance from U and V is
    at most ``containment_tol``; the projectors have unit norm, so the
    cutoff is absolute.
    """
    _check_ambient(U, V)
    n = U.n
    if U.dim == 0 or V.dim == 0:
        return OperatorSubspace.empty(n)
    eye = np.eye(n * n, dtype=np.complex128)
    M = np.vstack([eye - U.projector(), eye - V.projector()])
    _, s, vh = scipy.linalg.svd(M, full_matrices=True, lapack_driver="gesvd")
    keep = s <= tol.containment_tol
    K = vh[keep].conj().T
    return OperatorSubspace.from_vectors(n, K)


def containment_residual(U: OperatorSubspace, V: OperatorSubspace) -> float:
    """max over basis elements v of V of ||v - proj_U(v)||_HS."""
    _check_ambient(U, V)
    if V.dim == 0:
        return 0.0
    Vv = V.vectors()
    if U.dim == 0:
        return float(np.max(np.linalg.norm(Vv, axis=0)))
    Uv = U.vectors()
    R = Vv - Uv @ (Uv.conj().T @ Vv)
    return float(np.max(np.linalg.norm(R, axis=0)))


def subspace_contains(U: OperatorSubspace, V: OperatorSubspace,
                      tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, float]:
    """Is V ⊆ U?  Returns (flag, residual)."""
    r = containment_residual(U, V)
    return r <= tol.containment_tol, r

