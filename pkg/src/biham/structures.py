"""Admissible (g, J, omega) triples, realification, compatible Hermitian
pairs with their block decomposition, pencils of commuting fields,
pseudo-Hermitian metrics, and the nonlinear deformation of the linear
structure on phase space.

Conventions (fixed package-wide): Hermitian forms h(x, y) = x^dag H y are
antilinear in the first slot; g = Re h, omega = Im h; at the matrix level
g = omega o J, omega = -g o J and J = -g^{-1} o omega, so that the standard
triple is (I, [[0, -I], [I, 0]], [[0, I], [-I, 0]]) with omega in Darboux form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .linalg import (
    MatrixShapeError,
    commutant_basis,
    is_hermitian,
    is_skew_symmetric,
    is_symmetric,
    matrix_norm,
    require_square,
)
from .lineardyn import LinearVectorField

__all__ = [
    "NotAdmissible",
    "NotAHermitianForm",
    "NotGeneric",
    "NonRealSpectrum",
    "NotDiagonalizable",
    "NotAMetric",
    "AdmissibleTriple",
    "HermitianForm",
    "ConnectingOperator",
    "PseudoHermitianResult",
    "NonlinearChart",
    "complete_triple",
    "realify",
    "realify_hermitian_form",
    "compatibility_analysis",
    "pencil_fields",
    "pseudo_hermitian_metric",
    "nonlinear_chart",
    "invariant_hermitian_check",
]


class NotAdmissible(ValueError):
    """An admissibility identity failed; the message names which one."""


class NotAHermitianForm(ValueError):
    pass


class NotGeneric(ValueError):
    """Eigenvalue degeneracy beyond the double degeneracy of generic position."""


class NonRealSpectrum(ValueError):
    pass


class NotDiagonalizable(ValueError):
    pass


class NotAMetric(ValueError):
    pass


# ---------------------------------------------------------------------------
# Admissible triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleTriple:
    """Metric g (symmetric), complex structure J (J^2 = -I) and symplectic
    omega (skew) on R^{2n}, tied by omega = -g o J.

    ``pseudo_kahler`` is set when g is nondegenerate but not positive."""

    g: np.ndarray
    J: np.ndarray
    omega: np.ndarray
    pseudo_kahler: bool = False

    def validate(self, tol: float = 1e-10) -> None:
        g, J, Om = self.g, self.J, self.omega
        n2 = g.shape[0]
        scale = max(1.0, matrix_norm(J) ** 2)
        if matrix_norm(J @ J + np.eye(n2)) > tol * scale:
            raise NotAdmissible("J^2 = -I violated")
        if matrix_norm(J.T @ Om + Om @ J) > tol * max(1.0, matrix_norm(Om) * matrix_norm(J)):
            raise NotAdmissible("omega(x, Jy) + omega(Jx, y) = 0 violated")
        if matrix_norm(Om + g @ J) > tol * max(1.0, matrix_norm(g) * matrix_norm(J)):
            raise NotAdmissible("omega = -g o J violated")
        if not is_symmetric(g, tol):
            raise NotAdmissible("g is not symmetric")
        if not is_skew_symmetric(Om, tol):
            raise NotAdmissible("omega is not skew-symmetric")

    def hermitian_part(self) -> tuple[np.ndarray, np.ndarray]:
        """(g, omega) as the real/imaginary parts of h = g + i omega."""
        return self.g, self.omega


def _standard_J(n2: int) -> np.ndarray:
    n = n2 // 2
    Z = np.zeros((n, n))
    I = np.eye(n)
    return np.block([[Z, -I], [I, Z]])


def complete_triple(g: np.ndarray | None = None, J: np.ndarray | None = None,
                    omega: np.ndarray | None = None, tol: float = 1e-10) -> AdmissibleTriple:
    """Complete two admissible tensors to the full triple.

    g, J -> omega = -g o J;  omega, J -> g = omega o J;  g, omega -> J = -g^{-1} o omega.
    Non-positive g is reported via the pseudo_kahler flag, not an error.
    """
    supplied = [t is not None for t in (g, J, omega)]
    if sum(supplied) != 2:
        raise ValueError("exactly two of (g, J, omega) must be supplied")

    if omega is None:
        g = require_square(np.asarray(g, dtype=float), "g")
        J = require_square(np.asarray(J, dtype=float), "J")
        omega = -g @ J
    elif g is None:
        omega = require_square(np.asarray(omega, dtype=float), "omega")
        J = require_square(np.asarray(J, dtype=float), "J")
        g = omega @ J
    else:
        g = require_square(np.asarray(g, dtype=float), "g")
        omega = require_square(np.asarray(omega, dtype=float), "omega")
        J = -np.linalg.solve(g, omega)

    omega = np.asarray(omega, dtype=float)
    g = np.asarray(g, dtype=float)
    J = np.asarray(J, dtype=float)
    if not is_symmetric(g, tol):
        raise NotAdmissible("derived g is not symmetric")

    triple = AdmissibleTriple(g=g, J=J, omega=omega,
                              pseudo_kahler=bool(np.min(np.linalg.eigvalsh(0.5 * (g + g.T))) <= 0))
    triple.validate(tol)
    return triple


def realify(A: np.ndarray) -> np.ndarray:
    """Realified of a complex matrix A = alpha + i beta: [[alpha, -beta], [beta, alpha]]."""
    A = require_square(np.asarray(A, dtype=complex), "A")
    al, be = A.real, A.imag
    return np.block([[al, -be], [be, al]])


# ---------------------------------------------------------------------------
# Compatible Hermitian pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HermitianForm:
    """Positive-definite Hermitian matrix h on C^n; h(x, y) = x^dag h y."""

    h: np.ndarray

    def __post_init__(self):
        h = require_square(np.asarray(self.h, dtype=complex), "h")
        if not is_hermitian(h, 1e-12):
            raise NotAHermitianForm("h is not Hermitian")
        if np.min(np.linalg.eigvalsh(h)) <= 0:
            raise NotAHermitianForm("h is not positive-definite")
        object.__setattr__(self, "h", h)


def realify_hermitian_form(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real metric G and symplectic Omega of h on the realified space.

    Basis order (e_1..e_n, i e_1..i e_n); computed by evaluating h on the
    real basis, so the conventions cannot drift from the definition."""
    h = require_square(np.asarray(h, dtype=complex))
    n = h.shape[0]
    basis = [np.eye(n, dtype=complex)[:, k] for k in range(n)]
    basis += [1j * np.eye(n, dtype=complex)[:, k] for k in range(n)]
    G = np.empty((2 * n, 2 * n))
    Om = np.empty((2 * n, 2 * n))
    for a, u in enumerate(basis):
        for b, v in enumerate(basis):
            val = np.vdot(u, h @ v)  # antilinear first slot
            G[a, b] = val.real
            Om[a, b] = val.imag
    return G, Om


@dataclass
class ConnectingOperator:
    """F with h2(x, y) = h1(F x, y), its realified pair (G, T) and the
    simultaneous block decomposition with per-block eigenvalue and J2/J1 sign."""

    F: np.ndarray
    G_real: np.ndarray
    T_real: np.ndarray
    blocks: list[dict] = field(default_factory=list)
    generic: bool = False
    commutant_dim: int = 0


def compatibility_analysis(h1: HermitianForm, h2: HermitianForm,
                           tol: float = 1e-9) -> ConnectingOperator:
    """Connecting operator F = h1^{-1} h2 and the (G, T) block structure.

    Generic position holds iff F has n distinct eigenvalues, equivalently the
    commutant of F in M_n(C) is commutative (complex dimension n)."""
    H1, H2 = h1.h, h2.h
    if H1.shape != H2.shape:
        raise MatrixShapeError("h1 and h2 must have equal dimension")
    n = H1.shape[0]

    F = np.linalg.solve(H1, H2)
    # h2(x, y) = h1(Fx, y) <=> H2 = F^dag H1; verify
    resid = matrix_norm(H2 - F.conj().T @ H1)
    if resid > tol * max(1.0, matrix_norm(H2)):
        raise AssertionError(f"deff identity failed with residual {resid:.3e}")

    g1, om1 = realify_hermitian_form(H1)
    g2, om2 = realify_hermitian_form(H2)
    G_real = np.linalg.solve(g1, g2)
    T_real = np.linalg.solve(om1, om2)
    comm = matrix_norm(G_real @ T_real - T_real @ G_real)
    if comm > tol * max(1.0, matrix_norm(G_real) * matrix_norm(T_real)):
        raise AssertionError(f"[G, T] = 0 failed with residual {comm:.3e}")

    # J_a = -g_a^{-1} o omega_a
    J1 = -np.linalg.solve(g1, om1)
    J2 = -np.linalg.solve(g2, om2)

    evals = np.linalg.eigvals(F)
    evals = np.sort_complex(evals)
    lam_real = evals.real  # positive by positivity of both forms

    # cluster eigenvalues of F
    lam_sorted = np.sort(lam_real)
    clusters: list[list[float]] = []
    ctol = 1e-8 * max(1.0, float(np.max(np.abs(lam_sorted))))
    for lam in lam_sorted:
        if clusters and abs(lam - clusters[-1][-1]) <= ctol:
            clusters[-1].append(float(lam))
        else:
            clusters.append([float(lam)])
    distinct = len(clusters)

    blocks = []
    for c in clusters:
        lam = float(np.mean(c))
        # real eigenspace of G_real at lam as the numerical nullspace
        A = G_real - lam * np.eye(2 * n)
        _, s, Vh = np.linalg.svd(A)
        mask = s <= 100 * ctol * max(1.0, s[0])
        q = Vh[mask].T  # orthonormal basis of the eigenspace, real
        # sign of J2 relative to J1 on the block
        J1b = q.T @ J1 @ q
        J2b = q.T @ J2 @ q
        plus = matrix_norm(J2b - J1b)
        minus = matrix_norm(J2b + J1b)
        sign = 1 if plus < minus else -1
        blocks.append({"eigenvalue": lam, "dim": int(mask.sum()),
                       "sign": sign, "basis": q,
                       "g_ratio_residual": matrix_norm(q.T @ g2 @ q - lam * (q.T @ g1 @ q)),
                       "omega_ratio_residual": matrix_norm(q.T @ om2 @ q - sign * lam * (q.T @ om1 @ q))})

    comm_dim = len(commutant_basis(F.astype(complex)))
    generic = distinct == n and comm_dim == n
    return ConnectingOperator(F=F, G_real=G_real, T_real=T_real, blocks=blocks,
                              generic=generic, commutant_dim=comm_dim)


def pencil_fields(field: LinearVectorField, T: np.ndarray,
                  tol: float = 1e-10) -> list[LinearVectorField]:
    """Gamma_{k+1} = T^k Gamma for k = 0..n-1; requires [T, G] = 0 and T with
    n distinct, doubly degenerate eigenvalues on the realified space.

    The Vandermonde determinant of the distinct eigenvalues guarantees linear
    independence; both commutation and independence are asserted."""
    G = field.G
    T = require_square(np.asarray(T, dtype=float), "T")
    n2 = G.shape[0]
    n = n2 // 2
    if matrix_norm(T @ G - G @ T) > tol * max(1.0, matrix_norm(T) * matrix_norm(G)):
        raise NotGeneric("[T, G] != 0")

    w = np.linalg.eigvals(T)
    w = np.sort_complex(w)
    ctol = 1e-8 * max(1.0, float(np.max(np.abs(w))))
    groups: list[list[complex]] = []
    for lam in w:
        if groups and abs(lam - groups[-1][-1]) <= ctol:
            groups[-1].append(lam)
        else:
            groups.append([lam])
    if len(groups) != n or any(len(g) != 2 for g in groups):
        raise NotGeneric(
            f"T must have n = {n} distinct doubly degenerate eigenvalues, "
            f"got multiplicities {[len(g) for g in groups]}")

    fields = []
    Tk = np.eye(n2)
    for _ in range(n):
        fields.append(LinearVectorField(Tk @ G))
        Tk = Tk @ T

    # pairwise commutation
    for a in range(n):
        for b in range(n):
            r = matrix_norm(fields[a].G @ fields[b].G - fields[b].G @ fields[a].G)
            if r > tol * max(1.0, matrix_norm(fields[a].G) * matrix_norm(fields[b].G)):
                raise AssertionError("pencil fields failed to commute")
    # linear independence
    V = np.stack([f.G.ravel() for f in fields])
    if np.linalg.matrix_rank(V, tol=1e-10 * max(1.0, matrix_norm(G))) < n:
        raise NotGeneric("pencil fields are linearly dependent")
    return fields


# ---------------------------------------------------------------------------
# Pseudo-Hermitian metric
# ---------------------------------------------------------------------------

@dataclass
class PseudoHermitianResult:
    """Metric eta = sum |phi_n><phi_n| with the biorthonormal pair ({psi_n}, {phi_n})."""

    eta: np.ndarray
    psi: np.ndarray   # right eigenvectors as columns
    phi: np.ndarray   # dual (left) basis as columns, <phi_m|psi_n> = delta_mn
    eigenvalues: np.ndarray

    def deformed_commutator(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """[A, B]_eta = A eta B - B eta A, the commutator of the eta-deformed product."""
        return A @ self.eta @ B - B @ self.eta @ A

    def metric_from_commutant(self, A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        """eta A for A in the commutant of H; valid iff eta A is positive."""
        cand = self.eta @ A
        cand = 0.5 * (cand + cand.conj().T)
        if np.min(np.linalg.eigvalsh(cand)) <= tol:
            raise NotAMetric("eta A is not positive-definite")
        return cand


def pseudo_hermitian_metric(H: np.ndarray, tol: float = 1e-9) -> PseudoHermitianResult:
    """Positive metric eta rendering a diagonalizable real-spectrum H Hermitian.

    eta = sum_n |phi_n><phi_n| = (V V^dag)^{-1} with V the right eigenvector
    matrix and {phi_n} the columns of (V^{-1})^dag; satisfies H^dag eta = eta H.
    """
    H = require_square(np.asarray(H, dtype=complex), "H")
    n = H.shape[0]
    scale = max(1.0, matrix_norm(H))

    w, V = np.linalg.eig(H)
    if np.max(np.abs(w.imag)) > 1e-9 * scale:
        raise NonRealSpectrum(f"max |Im lambda| = {np.max(np.abs(w.imag)):.3e}")
    # diagonalizability: eigenvector matrix must be well conditioned
    s = np.linalg.svd(V, compute_uv=False)
    if s[-1] <= 1e-8 * s[0]:
        raise NotDiagonalizable("eigenvector matrix is numerically singular")

    Vinv = np.linalg.inv(V)
    phi = Vinv.conj().T
    eta = phi @ phi.conj().T          # sum_n |phi_n><phi_n| = (V V^dag)^{-1}
    eta = 0.5 * (eta + eta.conj().T)

    bio = matrix_norm(phi.conj().T @ V - np.eye(n))
    if bio > 1e-10 * max(1.0, matrix_norm(V)):
        raise AssertionError(f"biorthonormality residual {bio:.3e}")
    inter = matrix_norm(H.conj().T @ eta - eta @ H)
    if inter > tol * matrix_norm(eta) * scale:
        raise AssertionError(f"eta-intertwining residual {inter:.3e}")
    if np.min(np.linalg.eigvalsh(eta)) <= 0:
        raise AssertionError("eta failed positivity")

    return PseudoHermitianResult(eta=eta, psi=V, phi=phi, eigenvalues=w.real)


# ---------------------------------------------------------------------------
# Nonlinear chart
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NonlinearChart:
    """The chart (q, p) <-> (Q, P) with q = Q (1 + lam R^2), p = P (1 + lam R^2),
    inverted through the unique real root K of lam r^2 K^3 + K - 1 = 0, so that
    Q = q K(r), P = p K(r). Stateless; every evaluation recomputes K."""

    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")

    def K(self, r: float, tol: float = 1e-12, maxit: int = 200) -> float:
        """Unique real solution of lam r^2 K^3 + K - 1 = 0 in (0, 1].

        Safeguarded Newton on the bracket [0, 1] (K(0) = 1, K decreasing),
        falling back to bisection whenever a step leaves the bracket."""
        a = self.lam * r * r
        if a == 0.0:
            return 1.0
        lo, hi = 0.0, 1.0
        k = 1.0 / (1.0 + a) ** (1.0 / 3.0)  # decent starting guess
        for _ in range(maxit):
            f = a * k ** 3 + k - 1.0
            if abs(f) <= 2e-16 * (1.0 + a):
                break
            if f > 0:
                hi = k
            else:
                lo = k
            k_new = k - f / (3.0 * a * k ** 2 + 1.0)
            if not (lo < k_new < hi):
                k_new = 0.5 * (lo + hi)
            if k_new == k:
                break
            k = k_new
        resid = a * k ** 3 + k - 1.0
        if abs(resid) > tol * max(1.0, a):
            raise RuntimeError(f"K(r) residual {resid:.3e} above tolerance")
        return k

    def forward(self, q: float, p: float) -> tuple[float, float]:
        """(q, p) -> (Q, P) = (q K(r), p K(r)), r^2 = q^2 + p^2."""
        r = float(np.hypot(q, p))
        k = self.K(r)
        return q * k, p * k

    def backward(self, Q: float, P: float) -> tuple[float, float]:
        """(Q, P) -> (q, p) = (Q (1 + lam R^2), P (1 + lam R^2))."""
        R2 = Q * Q + P * P
        s = 1.0 + self.lam * R2
        return Q * s, P * s

    def jacobian(self, Q: float) -> float:
        """d mu / d mu' on the Lagrangian axis P = 0: 1 + 3 lam Q^2."""
        return 1.0 + 3.0 * self.lam * Q * Q

    def deformed_add(self, u: tuple[float, float], v: tuple[float, float]) -> tuple[float, float]:
        """u +_phi v = phi(phi^{-1} u + phi^{-1} v) with phi = backward."""
        a = self.forward(*u)
        b = self.forward(*v)
        return self.backward(a[0] + b[0], a[1] + b[1])

    def deformed_scale(self, c: float, u: tuple[float, float]) -> tuple[float, float]:
        """c ._phi u = phi(c phi^{-1} u)."""
        a = self.forward(*u)
        return self.backward(c * a[0], c * a[1])


def nonlinear_chart(lam: float) -> NonlinearChart:
    return NonlinearChart(lam=float(lam))


# ---------------------------------------------------------------------------
# Hilbert dynamics: invariant Hermitian structures
# ---------------------------------------------------------------------------

def invariant_hermitian_check(H: np.ndarray, K: np.ndarray, hbar: float = 1.0,
                              tol: float = 1e-10, n_times: int = 4) -> dict:
    """h_K(phi, psi) = <phi|K psi> is invariant under exp(-itH/hbar) iff [H, K] = 0.

    Checks the commutator and cross-checks by sampling the flow on a few
    times via the matrix exponential. K must be Hermitian positive-definite."""
    H = require_square(np.asarray(H, dtype=complex), "H")
    K = require_square(np.asarray(K, dtype=complex), "K")
    if not is_hermitian(K, 1e-12) or np.min(np.linalg.eigvalsh(0.5 * (K + K.conj().T))) <= 0:
        raise NotAMetric("K must be Hermitian positive-definite")

    scale = max(1.0, matrix_norm(H) * matrix_norm(K))
    comm = matrix_norm(H @ K - K @ H)
    flow_resid = 0.0
    for t in np.linspace(0.3, 2.1, n_times):
        U = scipy.linalg.expm(-1j * t * H / hbar)
        flow_resid = max(flow_resid, matrix_norm(U.conj().T @ K @ U - K))
    invariant = comm <= tol * scale
    return {"invariant": invariant, "commutator_residual": comm,
            "flow_residual": flow_resid}
