"""Smiley containment certificates and finite-dimensional lemma checks.

A matrix A is a (k, l)-type Smiley operator when C_k(C_l(A)) ⊆ VN(A), and
a proper one when C_k(C_l(A)) ⊆ Pol(A).  In finite dimensions every
matrix is proper for k = l (the classical theorem), and a matrix whose
nilpotent part has order m+1 is (s, s)-type for every s >= 2m+1.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .adcalc import (
    DEFAULT_POLARIZATION_BUDGET,
    ad_apply,
    ad_lift,
    ad_power_apply,
    centralizer,
    symmetrized_ad_kernel,
)
from .decomp import is_normal, is_selfadjoint, jordan_chevalley, nilpotency_order, re_im_parts
from .errors import PreconditionError
from .hulls import pol_hull, vn_hull
from .numlin import DEFAULT_TOL, ToleranceConfig, as_matrix, containment_residual


def matrix_digest(A) -> str:
    """sha256 over the shape and the complex128 C-order bytes of A."""
    A = np.ascontiguousarray(np.asarray(A, dtype=np.complex128))
    h = hashlib.sha256()
    h.update(f"{A.shape[0]}x{A.shape[1]}:".encode())
    h.update(A.tobytes())
    return h.hexdigest()


@dataclass
class SmileyCertificate:
    k: int
    l: int
    dim_Cl: int
    dim_CkCl: int
    dim_pol: int
    dim_vn: int
    residual_vn: float
    residual_pol: float
    is_smiley: bool
    is_proper: bool
    warnings: list = field(default_factory=list)
    tol: ToleranceConfig = DEFAULT_TOL
    input_digest: str = ""
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "dims": {"Cl": self.dim_Cl, "CkCl": self.dim_CkCl,
                     "pol": self.dim_pol, "vn": self.dim_vn},
            "residuals": {"vn": self.residual_vn, "pol": self.residual_pol},
            "verdicts": {"is_smiley": self.is_smiley, "is_proper": self.is_proper},
            "warnings": list(self.warnings),
            "tolerances": self.tol.as_dict(),
            "digest": self.input_digest,
            "seed": self.seed,
        }


def certify_smiley(A, k: int, l: int, tol: ToleranceConfig = DEFAULT_TOL,
                   seed: int | None = None,
                   budget: int = DEFAULT_POLARIZATION_BUDGET) -> SmileyCertificate:
    """Check C_k(C_l(A)) ⊆ VN(A) and ⊆ Pol(A), reporting raw residuals."""
    A = as_matrix(A, "A")
    Cl = centralizer(A, l, tol)
    CkCl = symmetrized_ad_kernel(Cl, k, tol, budget)
    pol = pol_hull(A, tol)
    vn = vn_hull(A, tol)
    r_vn = containment_residual(vn, CkCl)
    r_pol = containment_residual(pol, CkCl)
    notes = list(jordan_chevalley(A, tol).warnings)
    return SmileyCertificate(
        k=k, l=l,
        dim_Cl=Cl.dim, dim_CkCl=CkCl.dim, dim_pol=pol.dim, dim_vn=vn.dim,
        residual_vn=r_vn, residual_pol=r_pol,
        is_smiley=r_vn <= tol.containment_tol,
        is_proper=r_pol <= tol.containment_tol,
        warnings=notes, tol=tol, input_digest=matrix_digest(A), seed=seed,
    )


def lemma21_suite(A, s_max: int, tol: ToleranceConfig = DEFAULT_TOL):
    """For normal A, C_s(A) = C_1(A) for 2 <= s <= s_max.

    Returns ``(ok, dims, residual)`` where ``dims`` maps s to dim C_s(A)
    and ``residual`` is the worst mutual containment residual.
    """
    A = as_matrix(A, "A")
    if not is_normal(A, tol):
        raise PreconditionError("lemma21_suite needs a normal matrix")
    C1 = centralizer(A, 1, tol)
    dims = {1: C1.dim}
    ok = True
    worst = 0.0
    for s in range(2, s_max + 1):
        Cs = centralizer(A, s, tol)
        dims[s] = Cs.dim
        r = max(containment_residual(C1, Cs), containment_residual(Cs, C1))
        worst = max(worst, r)
        ok = ok and Cs.dim == C1.dim and r <= tol.containment_tol
    return ok, dims, worst


def _commutes(A, X, tol) -> bool:
    scale = 1 + np.linalg.norm(A, 2) * np.linalg.norm(X, 2)
    return np.linalg.norm(ad_apply(A, X), 2) <= tol.zero_tol * scale


def lemma22_check(A, X, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Self-adjoint A commuting with X also commutes with Re X and Im X."""
    A = as_matrix(A, "A")
    X = as_matrix(X, "X")
    if not is_selfadjoint(A, tol):
        raise PreconditionError("lemma22_check needs a self-adjoint A")
    if not _commutes(A, X, tol):
        raise PreconditionError("lemma22_check needs [A, X] = 0")
    bound = 10 * tol.zero_tol * (1 + np.linalg.norm(A, 2) * np.linalg.norm(X, 2))
    re, im = re_im_parts(X)
    return bool(np.linalg.norm(ad_apply(A, re), 2) <= bound
                and np.linalg.norm(ad_apply(A, im), 2) <= bound)


def fuglede_check(A, X, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Normal A commuting with X also commutes with A^*."""
    A = as_matrix(A, "A")
    X = as_matrix(X, "X")
    if not is_normal(A, tol):
        raise PreconditionError("fuglede_check needs a normal A")
    if not _commutes(A, X, tol):
        raise PreconditionError("fuglede_check needs [A, X] = 0")
    bound = 1e-6 * (1 + np.linalg.norm(A, 2) * np.linalg.norm(X, 2))
    return bool(np.linalg.norm(ad_apply(A.conj().T, X), 2) <= bound)


def binomial_ad_expansion(N, X, s: int) -> np.ndarray:
    """sum_j (-1)^(s-j) binom(s, j) N^j X N^(s-j), which equals ad_N^s(X)."""
    N = np.asarray(N, dtype=np.complex128)
    n = N.shape[0]
    powers = [np.eye(n, dtype=np.complex128)]
    for _ in range(s):
        powers.append(powers[-1] @ N)
    out = np.zeros((n, n), dtype=np.complex128)
    for j in range(s + 1):
        out += (-1) ** (s - j) * comb(s, j) * (powers[j] @ X @ powers[s - j])
    return out


def ad_nilpotent_vanish_check(N, m: int, tol: ToleranceConfig = DEFAULT_TOL,
                              seed: int = 0, samples: int = 20) -> bool:
    """N^(m+1) = 0 forces ad_N^(2m+1) = 0; also cross-checks the binomial expansion."""
    N = as_matrix(N, "N")
    if nilpotency_order(N, tol) != m + 1:
        raise PreconditionError(f"N does not have nilpotency order m+1 = {m + 1}")
    s = 2 * m + 1
    L = ad_lift(N).mat
    Ls = np.linalg.matrix_power(L, s)
    if np.linalg.norm(Ls, 2) > tol.zero_tol * np.linalg.norm(L, 2) ** s:
        return False
    rng = np.random.default_rng(seed)
    n = N.shape[0]
    nrm = np.linalg.norm(N, 2)
    for _ in range(samples):
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        direct = ad_power_apply(N, X, s)
        expanded = binomial_ad_expansion(N, X, s)
        scale = (1 + 2 * nrm) ** s * np.linalg.norm(X, 2)
        if np.linalg.norm(direct - expanded, 2) > 1e-10 * scale:
            return False
    return True

