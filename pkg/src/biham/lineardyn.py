"""The Hamiltonian inverse problem for linear vector fields.

A linear field x' = G x is Hamiltonian w.r.t. a constant symplectic form
Omega iff G factors as G = -Lambda H with Lambda = Omega^{-1} skew and H
symmetric (equivalently Omega G = -H symmetric). The module tests the
necessary and sufficient spectral conditions, builds the commuting hierarchy
G^{2k+1} with its Hamiltonians in involution, and generates alternative
Poisson/Hamiltonian pairs from the commutant and from Lie-derived tensors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    MatrixShapeError,
    is_skew_symmetric,
    is_symmetric,
    matrix_norm,
    rank_sequence,
    require_square,
    skew_part,
    spectral_decompose,
)

__all__ = [
    "NotHamiltonianForThisStructure",
    "NotASymmetry",
    "SingularDynamics",
    "LinearVectorField",
    "ConstantSymplectic",
    "QuadraticHamiltonian",
    "HamiltonicityVerdict",
    "HamiltonianHierarchy",
    "hamiltonicity_test",
    "factorize",
    "hierarchy",
    "commutant_deformation",
    "lie_deformed_structure",
    "involution_residual",
]


class NotHamiltonianForThisStructure(ValueError):
    """Omega*G failed to be symmetric; carries the asymmetry norm."""

    def __init__(self, asymmetry: float):
        super().__init__(f"Omega*G is not symmetric (asymmetry norm {asymmetry:.3e})")
        self.asymmetry = asymmetry


class NotASymmetry(ValueError):
    """The supplied T does not commute with G."""


class SingularDynamics(ValueError):
    """G is singular, so the Lie-derived Hamiltonian H2 = (Lambda H Lambda)^{-1}
    is undefined (one would have to proceed by exponentiation instead)."""


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearVectorField:
    """x' = G x on R^{2n}; G must be square of even dimension."""

    G: np.ndarray

    def __post_init__(self):
        G = require_square(np.asarray(self.G, dtype=float), "G")
        if G.shape[0] % 2 != 0:
            raise MatrixShapeError(f"linear field needs even dimension, got {G.shape[0]}")
        object.__setattr__(self, "G", G)

    @property
    def dim(self) -> int:
        return self.G.shape[0]


@dataclass(frozen=True)
class ConstantSymplectic:
    """Skew invertible Omega together with its inverse Lambda (the Poisson tensor)."""

    Omega: np.ndarray
    Lambda: np.ndarray = None

    def __post_init__(self):
        Om = require_square(np.asarray(self.Omega, dtype=float), "Omega")
        if not is_skew_symmetric(Om, 1e-12):
            raise MatrixShapeError("Omega must be skew-symmetric")
        Lam = self.Lambda
        if Lam is None:
            Lam = np.linalg.inv(Om)
        else:
            Lam = np.asarray(Lam, dtype=float)
        if matrix_norm(Lam @ Om - np.eye(Om.shape[0])) > 1e-10 * max(1.0, matrix_norm(Om) * matrix_norm(Lam)):
            raise MatrixShapeError("Lambda is not the inverse of Omega")
        object.__setattr__(self, "Omega", Om)
        object.__setattr__(self, "Lambda", Lam)

    @classmethod
    def standard(cls, n: int) -> "ConstantSymplectic":
        """Darboux form [[0, I], [-I, 0]] on R^{2n}."""
        Z = np.zeros((n, n))
        I = np.eye(n)
        return cls(np.block([[Z, I], [-I, Z]]))


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """H(x) = (1/2) x^T H x with H symmetric."""

    H: np.ndarray

    def __post_init__(self):
        H = require_square(np.asarray(self.H, dtype=float), "H")
        if not is_symmetric(H, 1e-12):
            raise MatrixShapeError("H must be symmetric")
        object.__setattr__(self, "H", H)

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return 0.5 * float(x @ self.H @ x)


@dataclass
class HamiltonicityVerdict:
    trace_ok: bool
    eigen_pairing_ok: bool
    jordan_ok: bool
    trace_residuals: list[float] = field(default_factory=list)

    @property
    def hamiltonian(self) -> bool:
        return self.trace_ok and self.eigen_pairing_ok and self.jordan_ok


@dataclass
class HamiltonianHierarchy:
    """Fields Gamma_k = G^{2k+1} and Hamiltonians H_k = (-1)^k G~^k H G^k, all
    Hamiltonian w.r.t. the same Omega, pairwise commuting / in involution."""

    entries: list[tuple[LinearVectorField, QuadraticHamiltonian]]
    involution_residuals: np.ndarray
    commutation_residuals: np.ndarray


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def hamiltonicity_test(field: LinearVectorField, kmax: int | None = None,
                       tol: float = 1e-10, cluster_tol: float = 1e-8) -> HamiltonicityVerdict:
    """Necessary-and-sufficient conditions for G to admit a constant
    Hamiltonian description: Tr G^{2k+1} = 0, (lam, -lam) spectral pairing,
    matching Jordan structure for degenerate non-imaginary pairs and even
    multiplicity of zero.
    """
    G = field.G
    n2 = G.shape[0]
    if kmax is None:
        kmax = n2 // 2
    if kmax < n2 // 2:
        raise ValueError(f"kmax must be at least n = {n2 // 2}")

    scale = max(matrix_norm(G), 1.0)

    # odd traces
    residuals = []
    trace_ok = True
    P = G.copy()
    G2 = G @ G
    for _ in range(kmax + 1):
        r = abs(np.trace(P))
        residuals.append(float(r))
        if r > tol * max(matrix_norm(P), 1.0):
            trace_ok = False
        P = P @ G2

    spec = spectral_decompose(G, cluster_tol=cluster_tol)
    vals = spec.cluster_values()
    mults = [len(c) for c in spec.clusters]
    atol = cluster_tol * scale

    # greedy (lam, -lam) matching on cluster representatives, ties by index
    eigen_pairing_ok = True
    unmatched = list(range(len(vals)))
    pairs: list[tuple[int, int]] = []
    while unmatched:
        i = unmatched.pop(0)
        if abs(vals[i]) <= atol:
            pairs.append((i, i))
            continue
        mate = None
        for j in unmatched:
            if abs(vals[j] + vals[i]) <= 2 * atol:
                mate = j
                break
        if mate is None:
            eigen_pairing_ok = False
            continue
        unmatched.remove(mate)
        if mults[i] != mults[mate]:
            eigen_pairing_ok = False
        pairs.append((i, mate))

    # Jordan structure: rank sequences must match for degenerate pairs that
    # are neither purely imaginary nor zero; zero needs even multiplicity.
    jordan_ok = eigen_pairing_ok
    for (i, j) in pairs:
        lam = vals[i]
        if abs(lam) <= atol:
            if mults[i] % 2 != 0:
                jordan_ok = False
            continue
        purely_imaginary = abs(lam.real) <= atol
        if purely_imaginary or mults[i] == 1:
            continue
        ri = rank_sequence(G, lam, jmax=n2)
        rj = rank_sequence(G, -lam, jmax=n2)
        if ri != rj:
            jordan_ok = False

    return HamiltonicityVerdict(trace_ok=trace_ok, eigen_pairing_ok=eigen_pairing_ok,
                                jordan_ok=jordan_ok, trace_residuals=residuals)


def factorize(field: LinearVectorField, omega: ConstantSymplectic,
              tol: float = 1e-10) -> QuadraticHamiltonian:
    """H = -Omega G; succeeds iff Omega G is symmetric, in which case
    i_Gamma omega = dH holds identically at the matrix level."""
    G, Om = field.G, omega.Omega
    if G.shape != Om.shape:
        raise MatrixShapeError(f"shape mismatch G {G.shape} vs Omega {Om.shape}")
    H = -Om @ G
    asym = matrix_norm(skew_part(H))
    if asym > tol * max(matrix_norm(H), 1.0):
        raise NotHamiltonianForThisStructure(asym)
    return QuadraticHamiltonian(0.5 * (H + H.T))


def involution_residual(A: np.ndarray, B: np.ndarray, Lam: np.ndarray) -> float:
    """|{(1/2)x^T A x, (1/2)x^T B x}| computed exactly at the matrix level:
    the bracket is the quadratic form with matrix sym(A Lam B) = (A Lam B - B Lam A)/2."""
    C = 0.5 * (A @ Lam @ B - B @ Lam @ A)
    return matrix_norm(C)


def hierarchy(field: LinearVectorField, omega: ConstantSymplectic,
              kmax: int) -> HamiltonianHierarchy:
    """Gamma_k = G^{2k+1}, H_k = (-1)^k G~^k H G^k; all w.r.t. the same Omega."""
    H0 = factorize(field, omega).H
    G = field.G
    Lam = omega.Lambda

    entries = []
    Gk = np.eye(G.shape[0])
    GTk = np.eye(G.shape[0])
    Godd = G.copy()
    G2 = G @ G
    for k in range(kmax + 1):
        Hk = ((-1) ** k) * GTk @ H0 @ Gk
        Hk = 0.5 * (Hk + Hk.T)
        entries.append((LinearVectorField(Godd.copy()), QuadraticHamiltonian(Hk)))
        Gk = Gk @ G
        GTk = GTk @ G.T
        Godd = Godd @ G2

    m = len(entries)
    inv_res = np.zeros((m, m))
    comm_res = np.zeros((m, m))
    for a in range(m):
        for b in range(m):
            inv_res[a, b] = involution_residual(entries[a][1].H, entries[b][1].H, Lam)
            comm_res[a, b] = matrix_norm(entries[a][0].G @ entries[b][0].G
                                         - entries[b][0].G @ entries[a][0].G)
    return HamiltonianHierarchy(entries=entries, involution_residuals=inv_res,
                                commutation_residuals=comm_res)


def commutant_deformation(field: LinearVectorField, omega: ConstantSymplectic,
                          T: np.ndarray, tol: float = 1e-10):
    """New description from T in the commutant of G:
    Lambda' = T^{-1} Lambda T^{-T}, H' = T^T H T; is_canonical iff T^T Omega T = Omega.

    Returns (ConstantSymplectic', QuadraticHamiltonian', is_canonical).
    """
    G = field.G
    T = require_square(np.asarray(T, dtype=float), "T")
    comm = matrix_norm(T @ G - G @ T)
    if comm > tol * max(1.0, matrix_norm(T) * matrix_norm(G)):
        raise NotASymmetry(f"[T, G] norm {comm:.3e} exceeds tolerance")
    if abs(np.linalg.det(T)) < 1e-300 or np.linalg.cond(T) > 1e14:
        raise np.linalg.LinAlgError("T is singular (or numerically so)")

    H = factorize(field, omega).H
    Tinv = np.linalg.inv(T)
    Lam_new = Tinv @ omega.Lambda @ Tinv.T
    H_new = T.T @ H @ T
    H_new = 0.5 * (H_new + H_new.T)

    Om_new = np.linalg.inv(Lam_new)
    Om_new = 0.5 * (Om_new - Om_new.T)
    is_canonical = matrix_norm(T.T @ omega.Omega @ T - omega.Omega) \
        <= tol * max(1.0, matrix_norm(omega.Omega))

    recon = matrix_norm(G + Lam_new @ H_new)
    if recon > 1e-9 * max(1.0, matrix_norm(G)):
        raise AssertionError(f"G = -Lambda' H' violated, residual {recon:.3e}")

    return ConstantSymplectic(Om_new, Lam_new), QuadraticHamiltonian(H_new), is_canonical


def lie_deformed_structure(omega: ConstantSymplectic, H: QuadraticHamiltonian,
                           rng: np.random.Generator | None = None):
    """Lie-derived pair: Lambda_2 = Lambda H Lambda H Lambda (manifestly skew)
    and H_2 with matrix (Lambda H Lambda)^{-1}; verifies Lambda_2 dH_2 = G x on
    random vectors. Requires G = -Lambda H invertible."""
    Lam = omega.Lambda
    Hm = H.H
    G = -Lam @ Hm
    n = G.shape[0]
    if abs(np.linalg.det(G)) < 1e-300 or np.linalg.cond(G) > 1e14:
        raise SingularDynamics("G = -Lambda H is singular; exponentiation route not implemented")

    core = Lam @ Hm @ Lam
    Lam2 = core @ Hm @ Lam
    Lam2 = 0.5 * (Lam2 - Lam2.T)
    H2 = np.linalg.inv(core)
    H2 = 0.5 * (H2 + H2.T)

    rng = rng or np.random.default_rng(0)
    for _ in range(5):
        x = rng.standard_normal(n)
        lhs = Lam2 @ (H2 @ x)            # Lambda_2 . dH_2 at x
        rhs = -G @ x                     # G = -Lambda_2 H_2
        if np.linalg.norm(lhs - rhs) > 1e-8 * max(1.0, np.linalg.norm(rhs)):
            raise AssertionError("Lie-derived pair failed to reproduce the dynamics")

    return Lam2, QuadraticHamiltonian(H2)
