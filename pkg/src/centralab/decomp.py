"""Jordan-Chevalley decomposition A = S + N and random test instances.

The semisimple part is assembled from spectral projectors onto generalized
eigenspaces.  Those come from one complex Schur form: for each eigenvalue
cluster the form is reordered (LAPACK ``ztrsen``) to put the cluster first,
and the block Sylvester equation ``T11 Y - Y T22 = -T12`` gives the
projector ``Q [[I, -Y], [0, 0]] Q^*``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.cluster.hierarchy
import scipy.linalg
import scipy.spatial.distance
from scipy.linalg import lapack

from .errors import InvalidMatrixError, PreconditionError
from .numlin import DEFAULT_TOL, ToleranceConfig, as_matrix

# Candidate radius for merging clusters of total size p into one defective
# eigenvalue is DEFECT_RADIUS_FACTOR * zero_tol**(1/p) * scale; the merge is
# only accepted after the nilpotency test on the reordered Schur block.
DEFECT_RADIUS_FACTOR = 4.0
AMBIGUOUS_DEFECT_RATIO = 100.0


@dataclass(frozen=True, eq=False)
class CanonicalDecomposition:
    S: np.ndarray
    N: np.ndarray
    m: int
    projectors: list = field(default_factory=list)  # [(eigenvalue, P)]
    warnings: list = field(default_factory=list)

    @property
    def eigenvalues(self) -> list:
        return [lam for lam, _ in self.projectors]


def is_normal(A, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    A = as_matrix(A)
    nrm = np.linalg.norm(A, 2)
    return bool(np.linalg.norm(A @ A.conj().T - A.conj().T @ A, 2) <= tol.zero_tol * nrm ** 2)


def is_selfadjoint(A, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    A = as_matrix(A)
    return bool(np.linalg.norm(A - A.conj().T, 2) <= tol.zero_tol * np.linalg.norm(A, 2))


def re_im_parts(X):
    """Hermitian real and imaginary parts, X = Re + i Im."""
    X = np.asarray(X, dtype=np.complex128)
    Xh = X.conj().T
    return (X + Xh) / 2, (X - Xh) / 2j


def nilpotency_order(N, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Smallest j with ||N^j|| <= zero_tol * (1 + ||N||)^j."""
    N = as_matrix(N, "N")
    n = N.shape[0]
    nrm = np.linalg.norm(N, 2)
    P = np.eye(n, dtype=np.complex128)
    for j in range(1, n + 1):
        P = P @ N
        if np.linalg.norm(P, 2) <= tol.zero_tol * (1 + nrm) ** j:
            return j
    raise PreconditionError("matrix is not numerically nilpotent (N^n is not small)")


def _reorder(T, Q, members):
    n = T.shape[0]
    select = np.zeros(n, dtype=np.int32)
    select[list(members)] = 1
    ts, qs, _, msel, _, _, info = lapack.ztrsen(select, T, Q, job="N")
    if info != 0 or msel != len(members):
        raise np.linalg.LinAlgError(f"Schur reordering failed (info={info})")
    return ts, qs


def _defect_ratio(T, Q, members, mu, tol) -> float:
    """||B^p|| / (zero_tol (1 + ||B||)^p) for B = T11 - mu on the reordered block.

    At most 1 means the block is numerically mu + nilpotent under the same
    criterion :func:`nilpotency_order` applies.
    """
    p = len(members)
    ts, _ = _reorder(T, Q, members)
    B = ts[:p, :p] - mu * np.eye(p)
    nb = np.linalg.norm(B, 2)
    return np.linalg.norm(np.linalg.matrix_power(B, p), 2) / (tol.zero_tol * (1 + nb) ** p)


def _cluster(eigs, T, Q, scale, tol, notes):
    """Cluster the Schur eigenvalues.

    Plain single linkage at radius cluster_tol * scale, extended along the
    single-linkage dendrogram: a node of size p joined at height h <=
    DEFECT_RADIUS_FACTOR * zero_tol**(1/p) * scale also becomes one cluster
    when its reordered Schur block passes the nilpotency test, since a
    defective eigenvalue of multiplicity p is split by rounding into p
    eigenvalues roughly eps**(1/p) apart.  Maximal accepted nodes win.
    """
    n = len(eigs)
    if n == 1:
        return [[0]]
    radius = tol.cluster_tol * scale
    pts = np.column_stack([eigs.real, eigs.imag])
    Z = scipy.cluster.hierarchy.linkage(scipy.spatial.distance.pdist(pts), method="single")
    members = {i: [i] for i in range(n)}
    accepted = {}
    ratios = {}
    for row, (a, b, h, _) in enumerate(Z):
        node = n + row
        group = sorted(members[int(a)] + members[int(b)])
        members[node] = group
        if h <= radius:
            accepted[node] = True
            continue
        if h <= DEFECT_RADIUS_FACTOR * tol.zero_tol ** (1.0 / len(group)) * scale:
            ratios[node] = _defect_ratio(T, Q, group, np.mean(eigs[group]), tol)
            accepted[node] = ratios[node] <= 1.0
        else:
            accepted[node] = False

    clusters = []
    stack = [2 * n - 2]
    while stack:
        node = stack.pop()
        if node < n or accepted[node]:
            clusters.append(members[node])
            continue
        h = Z[node - n, 2]
        if h <= 2 * radius:
            notes.append(f"borderline eigenvalue clusters: gap {h:.3e} within 2*cluster_tol")
        r = ratios.get(node)
        if r is not None and r <= AMBIGUOUS_DEFECT_RATIO:
            notes.append(
                f"eigenvalues {h:.3e} apart kept separate; merged block missed "
                f"the nilpotency test by a factor {r:.1f}")
        a, b = Z[node - n, :2]
        stack.extend([int(a), int(b)])
    return sorted(clusters)


def _spectral_projector(T, Q, members):
    n = T.shape[0]
    p = len(members)
    if p == n:
        return np.eye(n, dtype=np.complex128)
    ts, qs = _reorder(T, Q, members)
    T11, T12, T22 = ts[:p, :p], ts[:p, p:], ts[p:, p:]
    Y = scipy.linalg.solve_sylvester(T11, -T22, -T12)
    M = np.zeros((n, n), dtype=np.complex128)
    M[:p, :p] = np.eye(p)
    M[:p, p:] = -Y
    return qs @ M @ qs.conj().T


def jordan_chevalley(A, tol: ToleranceConfig = DEFAULT_TOL) -> CanonicalDecomposition:
    """Canonical decomposition A = S + N with S diagonalizable, N nilpotent, SN = NS."""
    A = as_matrix(A, "A")
    n = A.shape[0]
    T, Q = scipy.linalg.schur(A, output="complex")
    eigs = np.diag(T).copy()
    scale = np.linalg.norm(A, 2)
    notes: list[str] = []
    if scale == 0.0:
        clusters = [list(range(n))]
    else:
        clusters = _cluster(eigs, T, Q, scale, tol, notes)

    projectors = []
    S = np.zeros((n, n), dtype=np.complex128)
    for members in clusters:
        lam = complex(np.mean(eigs[members]))
        P = _spectral_projector(T, Q, members)
        projectors.append((lam, P))
        S += lam * P
    N = A - S
    order = nilpotency_order(N, tol)
    m = order - 1
    if m == 0:
        S, N = A.copy(), np.zeros_like(A)
    return CanonicalDecomposition(S=S, N=N, m=m, projectors=projectors, warnings=notes)


def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Qm, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Qm * (d / np.abs(d))


def random_conditioned(n: int, rng: np.random.Generator, cond_bound: float):
    """Random P with cond(P) <= cond_bound, returned with its inverse."""
    U = _haar_unitary(n, rng)
    V = _haar_unitary(n, rng)
    if n == 1:
        sv = np.ones(1)
    else:
        sv = np.exp(np.linspace(0.0, np.log(cond_bound), n))
        rng.shuffle(sv)
    P = (U * sv) @ V.conj().T
    Pinv = (V / sv) @ U.conj().T
    return P, Pinv


def _separated_points(count: int, rng: np.random.Generator, min_sep: float = 0.5,
                      radius: float = 2.0) -> list:
    pts: list[complex] = []
    while len(pts) < count:
        z = complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
        if all(abs(z - w) >= min_sep for w in pts):
            pts.append(z)
    return pts


def random_normal(n: int, seed: int, eigenvalues=None) -> np.ndarray:
    """U D U^* with U Haar-distributed (QR of a Gaussian, phases fixed)."""
    if n < 1:
        raise PreconditionError("n must be ≥ 1")
    rng = np.random.default_rng(seed)
    U = _haar_unitary(n, rng)
    if eigenvalues is None:
        eigenvalues = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    D = np.asarray(eigenvalues, dtype=np.complex128)
    if D.shape != (n,):
        raise PreconditionError(f"need {n} eigenvalues, got {D.shape}")
    return (U * D) @ U.conj().T


def random_spectral_of_type(n: int, m: int, seed: int, cond_bound: float = 20.0,
                            extra_multiplicity: int | None = None):
    """Random A = P (D + N0) P^{-1} of type m with its exact decomposition.

    D has a main eigenvalue of multiplicity q >= m+1 hosting N0, a Jordan
    block of size m+1 with random nonzero weights (so N0^(m+1) = 0 and
    N0^m != 0).  The remaining n - q eigenvalues are well separated from
    the main one, with occasional repeats.
    """
    if m < 0 or n < m + 1:
        raise PreconditionError(f"infeasible type: need n ≥ m+1, got n={n}, m={m}")
    if cond_bound < 1:
        raise PreconditionError("cond_bound must be ≥ 1")
    rng = np.random.default_rng(seed)
    if extra_multiplicity is None:
        extra_multiplicity = int(rng.integers(0, 2)) if n > m + 1 else 0
    q = min(n, m + 1 + extra_multiplicity)

    rest = n - q
    pts = _separated_points(1 + rest, rng)
    main, others = pts[0], pts[1:]
    diag = [main] * q
    for i in range(rest):
        if i > 0 and rng.random() < 0.3:
            diag.append(diag[-1])
        else:
            diag.append(others[i])
    D = np.diag(np.array(diag, dtype=np.complex128))
    N0 = np.zeros((n, n), dtype=np.complex128)
    for i in range(m):
        N0[i, i + 1] = rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.random())

    P, Pinv = random_conditioned(n, rng, cond_bound)
    S = P @ D @ Pinv
    N = P @ N0 @ Pinv
    A = S + N
    projectors = []
    for lam in dict.fromkeys(diag):
        E = np.diag((np.array(diag) == lam).astype(np.complex128))
        projectors.append((complex(lam), P @ E @ Pinv))
    truth = CanonicalDecomposition(S=S, N=N, m=m, projectors=projectors)
    return A, truth


def random_matrix(n: int, seed: int, kind: str = "generic", cond_bound: float = 10.0) -> np.ndarray:
    """Test matrices: 'generic', 'derogatory' (repeated eigenvalue, possibly
    defective) or 'nilpotent' (conjugated direct sum of Jordan blocks)."""
    rng = np.random.default_rng(seed)
    if kind == "generic":
        return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    P, Pinv = random_conditioned(n, rng, cond_bound)
    if kind == "derogatory":
        q = int(rng.integers(2, n + 1)) if n >= 2 else 1
        pts = _separated_points(1 + n - q, rng)
        diag = [pts[0]] * q + pts[1:]
        J = np.diag(np.array(diag, dtype=np.complex128))
        # at most one Jordan chain inside the repeated eigenvalue keeps it derogatory
        chain = int(rng.integers(1, q)) if q >= 2 else 1
        for i in range(chain - 1):
            J[i, i + 1] = 1.0
        return P @ J @ Pinv
    if kind == "nilpotent":
        J = np.zeros((n, n), dtype=np.complex128)
        i = 0
        while i < n:
            size = int(rng.integers(1, n - i + 1))
            for r in range(i, i + size - 1):
                J[r, r + 1] = 1.0
            i += size
        return P @ J @ Pinv
    raise ValueError(f"unknown kind {kind!r}")
