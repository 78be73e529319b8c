"""Commutator calculus lifted to matrix space.

``ad_A(X) = AX - XA`` acts on vec(X) as ``kron(I, A) - kron(A.T, I)``
under the column-stacking convention of :mod:`centralab.numlin`.

Set centralizers ``{B : ad_X^k(B) = 0 for all X in span(basis)}`` are
computed exactly by polarization: ``ad_X^k`` is a homogeneous degree-k
polynomial in the coordinates of X, and it vanishes identically iff each of
its coefficients does.  The coefficient attached to a multiset of basis
indices is the sum of ``ad_{X_i1} ... ad_{X_ik}`` over the distinct
orderings of that multiset.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, PolarizationBudgetError, PreconditionError
from .numlin import (
    DEFAULT_TOL,
    OperatorSubspace,
    StackedKernel,
    ToleranceConfig,
    as_matrix,
    kernel_basis,
    unvec,
    vec,
)

DEFAULT_POLARIZATION_BUDGET = 200_000


@dataclass(frozen=True, eq=False)
class LiftedOperator:
    """A linear map on n x n matrices, as an (n^2, n^2) matrix acting on vec(X)."""

    n: int
    mat: np.ndarray

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.shape != (self.n, self.n):
            raise DimensionMismatchError(f"expected {self.n}x{self.n} input, got {X.shape}")
        return unvec(self.mat @ vec(X), self.n)

    def power(self, s: int) -> "LiftedOperator":
        return LiftedOperator(self.n, np.linalg.matrix_power(self.mat, s))

    def __sub__(self, other: "LiftedOperator") -> "LiftedOperator":
        return LiftedOperator(self.n, self.mat - other.mat)

    def __matmul__(self, other: "LiftedOperator") -> "LiftedOperator":
        return LiftedOperator(self.n, self.mat @ other.mat)


def _check_positive(name: str, value: int):
    if int(value) != value or value < 1:
        raise PreconditionError(f"{name} must be ≥ 1, got {value!r}")


def ad_apply(A, X) -> np.ndarray:
    A = np.asarray(A)
    X = np.asarray(X)
    if A.shape != X.shape:
        raise DimensionMismatchError(f"shape mismatch: {A.shape} vs {X.shape}")
    return A @ X - X @ A


def ad_power_apply(A, X, s: int) -> np.ndarray:
    """s-fold iterate [A, [A, ... [A, X]]]."""
    _check_positive("s", s)
    Y = np.asarray(X)
    for _ in range(s):
        Y = ad_apply(A, Y)
    return Y


def multiplier_lift(A, side: str) -> LiftedOperator:
    """Left (X -> AX) or right (X -> XA) multiplication as a lifted matrix."""
    A = as_matrix(A)
    n = A.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    if side == "left":
        return LiftedOperator(n, np.kron(eye, A))
    if side == "right":
        return LiftedOperator(n, np.kron(A.T, eye))
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def ad_lift(A) -> LiftedOperator:
    return multiplier_lift(A, "left") - multiplier_lift(A, "right")


def centralizer(A, s: int, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorSubspace:
    """C_s(A) = ker(ad_A^s)."""
    _check_positive("s", s)
    A = as_matrix(A)
    return kernel_basis(ad_lift(A).power(s), tol, scale=np.linalg.norm(A, 2) ** s)


def _basis_list(basis) -> list[np.ndarray]:
    if isinstance(basis, OperatorSubspace):
        return list(basis.basis)
    mats = [np.asarray(X, dtype=np.complex128) for X in basis]
    if mats:
        shape = mats[0].shape
        for X in mats:
            if X.shape != shape or X.ndim != 2 or shape[0] != shape[1]:
                raise DimensionMismatchError("basis elements must be square and of equal size")
    return mats


def symmetrized_operators(lifts: Sequence[np.ndarray], k: int):
    """Yield (multiset, symmetrized operator) in lexicographic multiset order.

    The operator for a sorted index tuple t is the sum of lifts[w1] @ ... @
    lifts[wk] over distinct rearrangements w of t, built level by level from
    Sym(t) = sum over distinct i in t of lifts[i] @ Sym(t minus one i).
    """
    d = len(lifts)
    level = {(i,): lifts[i] for i in range(d)}
    for j in range(2, k + 1):
        nxt = {}
        for t in combinations_with_replacement(range(d), j):
            acc = None
            prev = None
            for pos, i in enumerate(t):
                if i == prev:
                    continue
                prev = i
                term = lifts[i] @ level[t[:pos] + t[pos + 1:]]
                acc = term if acc is None else acc + term
            nxt[t] = acc
        level = nxt
    for t in combinations_with_replacement(range(d), k):
        yield t, level[t]


def symmetrized_ad_kernel(basis, k: int, tol: ToleranceConfig = DEFAULT_TOL,
                          budget: int = DEFAULT_POLARIZATION_BUDGET,
                          n: int | None = None) -> OperatorSubspace:
    """{B : ad_X^k(B) = 0 for every X in span(basis)}, computed by polarization."""
    _check_positive("k", k)
    mats = _basis_list(basis)
    if isinstance(basis, OperatorSubspace):
        n = basis.n
    elif mats:
        n = mats[0].shape[0]
    elif n is None:
        raise ValueError("empty basis needs the ambient n")
    if not mats:
        return OperatorSubspace.full(n)
    count = comb(len(mats) + k - 1, k)
    if count > budget:
        raise PolarizationBudgetError(
            f"polarization needs {count} symmetrized operators "
            f"(d={len(mats)}, k={k}), budget is {budget}")
    lifts = [ad_lift(X).mat for X in mats]
    acc = StackedKernel(n * n)
    for _, op in symmetrized_operators(lifts, k):
        acc.add(op)
    scale = max(np.linalg.norm(X, 2) for X in mats) ** k
    return OperatorSubspace.from_vectors(n, acc.kernel(tol, scale))


def double_centralizer(A, k: int, l: int, tol: ToleranceConfig = DEFAULT_TOL,
                       budget: int = DEFAULT_POLARIZATION_BUDGET) -> OperatorSubspace:
    """C_k(C_l(A))."""
    _check_positive("k", k)
    _check_positive("l", l)
    return symmetrized_ad_kernel(centralizer(A, l, tol), k, tol, budget)


def randomized_set_centralizer(basis, k: int, tol: ToleranceConfig = DEFAULT_TOL,
                               samples: int = 4, seed: int = 0,
                               n: int | None = None,
                               max_rounds: int = 1000) -> OperatorSubspace:
    """Monte-Carlo version of :func:`symmetrized_ad_kernel`.

    Each round adds ``ker(ad_X^k)`` constraints for ``samples`` random
    complex-Gaussian combinations X of the basis.  Stops once the kernel
    dimension is unchanged over two consecutive rounds.  The result always
    contains the exact answer; it equals it once enough generic samples
    have been drawn.
    """
    _check_positive("k", k)
    _check_positive("samples", samples)
    mats = _basis_list(basis)
    if isinstance(basis, OperatorSubspace):
        n = basis.n
    elif mats:
        n = mats[0].shape[0]
    elif n is None:
        raise ValueError("empty basis needs the ambient n")
    if not mats:
        return OperatorSubspace.full(n)
    stack = np.stack(mats)
    rng = np.random.default_rng(seed)
    acc = StackedKernel(n * n)
    scale = 0.0
    dims = []
    K = None
    for _ in range(max_rounds):
        for _ in range(samples):
            c = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
            c /= np.linalg.norm(c)
            X = np.einsum("d,dij->ij", c, stack)
            scale = max(scale, np.linalg.norm(X, 2) ** k)
            acc.add(ad_lift(X).power(k).mat)
        K = acc.kernel(tol, scale)
        dims.append(K.shape[1])
        if len(dims) >= 3 and dims[-1] == dims[-2] == dims[-3]:
            break
    return OperatorSubspace.from_vectors(n, K)
