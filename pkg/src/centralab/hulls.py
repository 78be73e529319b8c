"""Polynomial hull, generated *-algebra and commutants.

For a non-normal A the von Neumann algebra VN(A) (the unital *-algebra
generated by A) can be strictly larger than the double commutant {A}'' of
A alone, because it is *-closed.  Smiley containment is tested against
VN(A), computed here as the *-algebra generated by A and cross-checked
against the double commutant of {A, A^*}.
"""

from __future__ import annotations

import numpy as np

from .adcalc import ad_lift
from .errors import HullIntegrityError
from .numlin import (
    DEFAULT_TOL,
    OperatorSubspace,
    StackedKernel,
    ToleranceConfig,
    as_matrix,
    containment_residual,
    orthonormalize,
)


def pol_hull(A, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorSubspace:
    """Orthonormal basis of span{I, A, A^2, ...}.

    Arnoldi on matrix space: each new direction is A times the previous
    basis element, orthogonalized twice.  Growth stops when the new
    component is below rank_rel_tol * ||A||_2, i.e. at the degree of the
    minimal polynomial.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    nrm = np.linalg.norm(A, 2)
    basis = [np.eye(n, dtype=np.complex128) / np.sqrt(n)]
    while len(basis) < n:
        w = A @ basis[-1]
        for _ in range(2):
            for q in basis:
                w = w - np.vdot(q, w) * q
        h = np.linalg.norm(w)
        if h <= tol.rank_rel_tol * nrm or h == 0.0:
            break
        basis.append(w / h)
    return OperatorSubspace(n, np.stack(basis))


def commutant(S, tol: ToleranceConfig = DEFAULT_TOL, n: int | None = None) -> OperatorSubspace:
    """{X : XY = YX for all Y in S}, the joint kernel of ad over a basis of S."""
    if isinstance(S, OperatorSubspace):
        mats, n = list(S.basis), S.n
    else:
        mats = [as_matrix(Y) for Y in S]
        if mats:
            n = mats[0].shape[0]
        elif n is None:
            raise ValueError("commutant of an empty list needs the ambient n")
    acc = StackedKernel(n * n)
    for Y in mats:
        acc.add(ad_lift(Y).mat)
    scale = max((np.linalg.norm(Y, 2) for Y in mats), default=0.0)
    return OperatorSubspace.from_vectors(n, acc.kernel(tol, scale))


def star_algebra_hull(generators, tol: ToleranceConfig = DEFAULT_TOL,
                      max_rounds: int | None = None) -> OperatorSubspace:
    """Unital *-algebra generated by ``generators``.

    Starts from {I} ∪ generators ∪ adjoints and adjoins all pairwise
    products of the current basis, re-orthonormalizing each round, until the
    dimension stops growing.
    """
    gens = [as_matrix(G, "generator") for G in generators]
    if not gens:
        raise ValueError("star_algebra_hull needs at least one generator")
    n = gens[0].shape[0]
    start = [np.eye(n, dtype=np.complex128)] + gens + [G.conj().T for G in gens]
    current = orthonormalize(start, tol)
    cap = max_rounds if max_rounds is not None else n * n + 2
    for _ in range(cap):
        B = current.basis
        products = np.einsum("aij,bjk->abik", B, B).reshape(-1, n, n)
        grown = orthonormalize(np.concatenate([B, products]), tol)
        if grown.dim == current.dim:
            return current
        current = grown
    raise HullIntegrityError(f"*-algebra closure did not stabilize within {cap} rounds")


def vn_hull(A, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorSubspace:
    """VN(A): the unital *-algebra generated by A, verified by double commutant."""
    A = as_matrix(A, "A")
    n = A.shape[0]
    hull = star_algebra_hull([A], tol)
    gens = orthonormalize([A, A.conj().T], tol, n=n)
    dc = commutant(commutant(gens, tol, n=n), tol)
    r1 = containment_residual(hull, dc)
    r2 = containment_residual(dc, hull)
    if dc.dim != hull.dim or max(r1, r2) > tol.containment_tol:
        raise HullIntegrityError(
            f"generated *-algebra (dim {hull.dim}) and double commutant (dim {dc.dim}) "
            f"disagree: residuals {r1:.3e}, {r2:.3e}")
    return hull
