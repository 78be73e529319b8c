"""Truncated unilateral shift experiments.

The shift e_j -> e_{j+1} compressed to the first n basis vectors is the
nilpotent Jordan block J_n (ones on the subdiagonal).  For X in matrix
space, with x_{k,j} = <X e_j, e_k> and out-of-range entries read as zero,

    ad_{J_n}^2(X)_{k,j} = x_{k-2,j} - 2 x_{k-1,j+1} + x_{k,j+2},

which is the shift's second-difference condition whenever j + 2 <= n.  The
columns j = n-1, n lose terms to the compression; they are located here by
comparing rows of the lifted operator against the untruncated functional
rather than assumed.

Only the finite-dimensional structure is asserted.  In particular nothing
here claims C_2(C_2(J_n)) = C I, which holds for the shift on l^2 but not
for its truncations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .adcalc import ad_lift, ad_power_apply, centralizer, double_centralizer
from .certify import SmileyCertificate, certify_smiley
from .decomp import nilpotency_order
from .errors import PreconditionError
from .hulls import pol_hull
from .numlin import DEFAULT_TOL, ToleranceConfig


def shift_truncation(n: int) -> np.ndarray:
    """J_n: ones on the first subdiagonal, so J_n e_j = e_{j+1}."""
    if int(n) != n or n < 2:
        raise PreconditionError(f"shift truncation needs n ≥ 2, got {n!r}")
    return np.eye(n, k=-1, dtype=np.complex128)


def _shift_functional(n: int, k: int, j: int) -> dict:
    """Untruncated second-difference condition at (k, j), 1-based, as {(row, col): coeff}.

    Rows below 1 are structurally zero (the shift has no e_0), so they are
    dropped; columns above n are kept and mark the condition as reaching
    outside the truncation.
    """
    terms = {}
    for (r, c), w in (((k - 2, j), 1.0), ((k - 1, j + 1), -2.0), ((k, j + 2), 1.0)):
        if r >= 1:
            terms[(r, c)] = terms.get((r, c), 0.0) + w
    return terms


def _functional_row(n: int, terms: dict) -> np.ndarray | None:
    row = np.zeros(n * n)
    for (r, c), w in terms.items():
        if c > n:
            return None
        row[(c - 1) * n + (r - 1)] = w
    return row


def interior_window(n: int) -> list[tuple[int, int]]:
    """(k, j) positions where the truncated ad^2 row equals the shift's condition."""
    L2 = ad_lift(shift_truncation(n)).power(2).mat.real
    window = []
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            row = _functional_row(n, _shift_functional(n, k, j))
            if row is not None and np.array_equal(L2[(j - 1) * n + (k - 1)], row):
                window.append((k, j))
    return window


def parameterized_residual(X) -> float:
    """Largest violation of x_{k,c} = (c-1) x_{k-c+2,2} - (c-2) x_{k-c+1,1} for c >= 3.

    This is the closed form of a shift 2-centralizer element in terms of
    its first two columns; for example x_{2,3} = 2 x_{1,2} and
    x_{3,3} = 2 x_{2,2} - x_{1,1}.
    """
    X = np.asarray(X)
    n = X.shape[0]

    def x(r, c):
        return X[r - 1, c - 1] if 1 <= r <= n and 1 <= c <= n else 0.0

    worst = 0.0
    for c in range(3, n + 1):
        for k in range(1, n + 1):
            pred = (c - 1) * x(k - c + 2, 2) - (c - 2) * x(k - c + 1, 1)
            worst = max(worst, abs(x(k, c) - pred))
    return float(worst)


@dataclass
class C2StructureReport:
    n: int
    dim_c2: int
    window: list = field(repr=False)
    boundary_columns: list
    condition_residual: float
    parameterized_residual: float
    mismatches: list
    passed: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dim_c2": self.dim_c2,
            "window_size": len(self.window),
            "boundary_columns": list(self.boundary_columns),
            "condition_residual": self.condition_residual,
            "parameterized_residual": self.parameterized_residual,
            "mismatches": [list(p) for p in self.mismatches],
            "passed": self.passed,
        }


def c2_structure_check(n: int, tol: ToleranceConfig = DEFAULT_TOL,
                       residual_bound: float = 1e-8) -> C2StructureReport:
    """Check every C_2(J_n) basis element against the shift's second-difference conditions.

    The window of interior positions is found by comparing rows of the lifted
    operator with the untruncated conditions; a position whose condition fits
    inside the truncation but disagrees with the lifted row is a mismatch and
    fails the check.
    """
    if int(n) != n or n < 6:
        raise PreconditionError(f"c2_structure_check needs n ≥ 6, got {n!r}")
    J = shift_truncation(n)
    C2 = centralizer(J, 2, tol)
    window = interior_window(n)
    inside = {(k, j) for j in range(1, n + 1) for k in range(1, n + 1)
              if _functional_row(n, _shift_functional(n, k, j)) is not None}
    mismatches = sorted(inside - set(window))
    boundary = sorted({j for j in range(1, n + 1) for k in range(1, n + 1)
                       if (k, j) not in window})
    worst_cond = 0.0
    worst_param = 0.0
    for X in C2.basis:
        # (k, j) entry of ad^2 over the window is exactly the shift condition
        D = ad_power_apply(J, X, 2)
        for k, j in window:
            worst_cond = max(worst_cond, abs(D[k - 1, j - 1]))
        worst_param = max(worst_param, parameterized_residual(X))
    passed = (not mismatches and worst_cond <= residual_bound
              and worst_param <= residual_bound)
    return C2StructureReport(
        n=n, dim_c2=C2.dim, window=window, boundary_columns=boundary,
        condition_residual=float(worst_cond), parameterized_residual=float(worst_param),
        mismatches=mismatches, passed=passed)


def progression_constraints(n: int) -> tuple[np.ndarray, np.ndarray]:
    """The two parameterized C_2 elements with x_11 = 1 and with x_12 = 1.

    X1 = diag(1, 0, -1, ..., -(n-2)) and X2 has superdiagonal entries
    x_{k,k+1} = k.  X1 lies in C_2(J_n); X2 is the truncation of the shift's
    element and violates the conditions only in the boundary columns.
    """
    if int(n) != n or n < 4:
        raise PreconditionError(f"diag progression check needs n ≥ 4, got {n!r}")
    X1 = np.diag([1.0] + [-(c - 2.0) for c in range(2, n + 1)]).astype(np.complex128)
    X2 = np.diag(np.arange(1, n, dtype=float), k=1).astype(np.complex128)
    return X1, X2


@dataclass
class ProgressionReport:
    n: int
    satisfied: bool
    is_progression: bool
    residual: float

    @property
    def consistent(self) -> bool:
        return self.satisfied == self.is_progression

    def to_dict(self) -> dict:
        return {"n": self.n, "satisfied": self.satisfied,
                "is_progression": self.is_progression,
                "consistent": self.consistent, "residual": self.residual}


def diag_progression_check(n: int, diagonal=None,
                           tol: ToleranceConfig = DEFAULT_TOL) -> ProgressionReport:
    """Does diag(beta) satisfy ad_X1^2 = ad_X2^2 = 0, and is beta an arithmetic progression?

    ``ad_X2^2(diag beta)`` has (k, k+2) entry k (k+1) (beta_{k+2} - 2 beta_{k+1} + beta_k),
    so the commutator conditions hold exactly when the second differences
    vanish.  ``diagonal`` defaults to 1, 2, ..., n.
    """
    X1, X2 = progression_constraints(n)
    beta = np.arange(1, n + 1, dtype=float) if diagonal is None else np.asarray(diagonal)
    if beta.shape != (n,):
        raise PreconditionError(f"diagonal must have length {n}, got shape {beta.shape}")
    if not np.all(np.isfinite(beta)):
        raise PreconditionError("diagonal has non-finite entries")
    B = np.diag(beta).astype(np.complex128)
    bnorm = float(np.max(np.abs(beta)))
    r1 = np.linalg.norm(ad_power_apply(X1, B, 2), 2)
    r2 = np.linalg.norm(ad_power_apply(X2, B, 2), 2)
    residual = float(max(r1, r2))
    scale = 1 + np.linalg.norm(X2, 2) ** 2 * bnorm
    satisfied = residual <= tol.zero_tol * scale
    second = np.abs(np.diff(beta, 2))
    is_progression = bool(np.all(second <= tol.zero_tol * (1 + bnorm)))
    return ProgressionReport(n=n, satisfied=bool(satisfied),
                             is_progression=is_progression, residual=residual)


def truncated_smiley(n: int, k: int, l: int, tol: ToleranceConfig = DEFAULT_TOL,
                     seed: int | None = None) -> SmileyCertificate:
    """Smiley certificate for J_n; the classical theorem makes it proper whenever k <= l."""
    if k not in (1, 2):
        raise PreconditionError(f"k must be 1 or 2, got {k!r}")
    if int(l) != l or l < k:
        raise PreconditionError(f"need k ≤ l, got k={k}, l={l}")
    return certify_smiley(shift_truncation(n), k, l, tol, seed=seed)


def nilpotent_lift_vanishes(n: int, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """nilpotency_order(J_n) = n and ad_lift(J_n)^(2n-1) = 0."""
    J = shift_truncation(n)
    if nilpotency_order(J, tol) != n:
        return False
    L = ad_lift(J)
    return bool(np.linalg.norm(L.power(2 * n - 1).mat, 2)
                <= tol.zero_tol * np.linalg.norm(L.mat, 2) ** (2 * n - 1))


def dimension_table(sizes, tol: ToleranceConfig = DEFAULT_TOL) -> list[dict]:
    """dim C_2(J_n), dim C_2(C_2(J_n)) and dim Pol(J_n) per n, recorded as data."""
    rows = []
    for n in sizes:
        J = shift_truncation(n)
        rows.append({
            "n": int(n),
            "dim_c2": centralizer(J, 2, tol).dim,
            "dim_c2c2": double_centralizer(J, 2, 2, tol).dim,
            "dim_pol": pol_hull(J, tol).dim,
        })
    return rows
