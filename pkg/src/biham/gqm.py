"""Geometric quantum mechanics for finite-level systems: rank-one projectors
and their fiducial superposition, the momentum map, the two-level Bloch
tensors and Kahler structure, quadratic-function brackets on the projective
space, finite GNS representations, K-deformed operator algebra, and the
truncated deformed Fock algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import is_hermitian, matrix_norm, require_square

__all__ = [
    "DegenerateFiducial",
    "NotAState",
    "NotInvariant",
    "PureState",
    "BlochTensors",
    "GnsRepresentation",
    "DeformedFock",
    "PAULI",
    "superpose",
    "transition_probability",
    "momentum_map",
    "bloch_geometry",
    "bloch_state",
    "quadratic_bracket_check",
    "gns_construct",
    "k_deformed_algebra",
    "deformed_fock",
]


class DegenerateFiducial(ValueError):
    """The fiducial projector is (numerically) orthogonal to an input state."""


class NotAState(ValueError):
    pass


class NotInvariant(ValueError):
    """K fails to commute with H, so h_K is not preserved by the flow."""


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


# ---------------------------------------------------------------------------
# Pure states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PureState:
    """Rank-one projector: rho^dag = rho, Tr rho = 1, rho^2 = rho (all to 1e-10)."""

    rho: np.ndarray

    def __post_init__(self):
        rho = require_square(np.asarray(self.rho, dtype=complex), "rho")
        scale = max(1.0, matrix_norm(rho))
        if not is_hermitian(rho, 1e-10):
            raise NotAState("rho is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-10:
            raise NotAState(f"Tr rho = {np.trace(rho):.12f} != 1")
        if matrix_norm(rho @ rho - rho) > 1e-10 * scale:
            raise NotAState("rho is not idempotent")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "PureState":
        x = np.asarray(x, dtype=complex).ravel()
        nrm = np.vdot(x, x).real
        if nrm <= 0:
            raise NotAState("zero vector")
        return cls(np.outer(x, x.conj()) / nrm)


def transition_probability(rho1: PureState, rho2: PureState) -> float:
    """Tr(rho1 rho2), the normalized transition probability in [0, 1]."""
    val = float(np.trace(rho1.rho @ rho2.rho).real)
    return min(max(val, 0.0), 1.0)


def superpose(rho1: PureState, rho2: PureState, rho0: PureState,
              c1: complex, c2: complex, tol: float = 1e-8) -> PureState:
    """Fiducial superposition of orthogonal pure states:

    rho = sum_{ij} c_i conj(c_j) rho_i rho_0 rho_j / sqrt(Tr(rho_i rho_0 rho_j rho_0))

    The fiducial rho_0 must not be orthogonal to either input, the inputs
    must be mutually orthogonal, and |c1|^2 + |c2|^2 = 1."""
    r1, r2, r0 = rho1.rho, rho2.rho, rho0.rho
    if abs(abs(c1) ** 2 + abs(c2) ** 2 - 1.0) > 1e-10:
        raise ValueError("coefficients must satisfy |c1|^2 + |c2|^2 = 1")
    if float(np.trace(r1 @ r2).real) > tol:
        raise ValueError("input projectors must be orthogonal")
    for idx, ri in ((1, r1), (2, r2)):
        if float(np.trace(ri @ r0).real) <= tol:
            raise DegenerateFiducial(f"fiducial is orthogonal to rho_{idx}")

    coeffs = {1: c1, 2: c2}
    rhos = {1: r1, 2: r2}
    out = np.zeros_like(r1)
    for i in (1, 2):
        for j in (1, 2):
            num = rhos[i] @ r0 @ rhos[j]
            den = np.sqrt(float(np.trace(rhos[i] @ r0 @ rhos[j] @ r0).real))
            out = out + coeffs[i] * np.conj(coeffs[j]) * num / den
    return PureState(out)


def momentum_map(x: np.ndarray) -> np.ndarray:
    """mu(x) = |x><x| (unnormalized); equivariant: mu(Ux) = U mu(x) U^dag."""
    x = np.asarray(x, dtype=complex).ravel()
    if np.vdot(x, x).real == 0:
        raise ValueError("momentum map is undefined at the zero vector")
    return np.outer(x, x.conj())


# ---------------------------------------------------------------------------
# Bloch tensors on the two-level orbit
# ---------------------------------------------------------------------------

def _cross_matrix(v: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -v[2], v[1]],
                     [v[2], 0.0, -v[0]],
                     [-v[1], v[0], 0.0]])


@dataclass
class BlochTensors:
    """Tensors of the u*(H) orbit through xi (|xi| = 1/2, y^0 = 1/2).

    R and I are the ambient contravariant Jordan and Poisson tensors in the
    coordinates (y^0..y^3); eta, sigma live on the tangent plane at xi, and
    j is the complex structure. The tangent map I~ carries y -> 2 xi x y,
    which is what makes j^3 = -j exact on rank-one projectors."""

    xi: np.ndarray
    R: np.ndarray                 # 4x4 symmetric
    I: np.ndarray                 # 4x4 antisymmetric
    j_ambient: np.ndarray         # 3x3, y -> 2 (xi x y)
    tangent_basis: np.ndarray     # 3x2, orthonormal, orthogonal to xi

    def eta(self, u: np.ndarray, v: np.ndarray) -> float:
        """Symplectic form on tangent 3-vectors: eta(u, v) = 2 xi . (u x v)."""
        return float(2.0 * np.dot(self.xi, np.cross(u, v)))

    def sigma(self, u: np.ndarray, v: np.ndarray) -> float:
        """Metric on tangent 3-vectors: sigma(u, v) = u . v."""
        return float(np.dot(u, v))

    def j(self, v: np.ndarray) -> np.ndarray:
        """Complex structure on tangent vectors: v -> 2 (xi x v)."""
        return self.j_ambient @ np.asarray(v, dtype=float)

    def I_form(self, yA: np.ndarray, yB: np.ndarray) -> float:
        """Poisson tensor on one-forms: I(A^, B^)(xi) = 2 (yA x yB) . xi."""
        return float(2.0 * np.dot(np.cross(yA, yB), self.xi))

    def R_form(self, A4: np.ndarray, B4: np.ndarray) -> float:
        """Jordan tensor on ambient one-forms with components (y^0, y)."""
        return float(A4 @ self.R @ B4)


def bloch_geometry(xi: np.ndarray, tol: float = 1e-10) -> BlochTensors:
    """Bloch tensors at a point xi of the sphere |xi|^2 = 1/4 (y^0 = 1/2)."""
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.size != 3:
        raise ValueError("xi must be a real 3-vector")
    if abs(np.dot(xi, xi) - 0.25) > tol:
        raise ValueError(f"|xi|^2 = {np.dot(xi, xi):.12f} is not 1/4")

    xi0 = 0.5
    R = np.zeros((4, 4))
    R[0, 0] = 2.0 * xi0
    R[0, 1:] = 2.0 * xi
    R[1:, 0] = 2.0 * xi
    R[1:, 1:] = 2.0 * xi0 * np.eye(3)

    I = np.zeros((4, 4))
    I[1:, 1:] = 2.0 * _cross_matrix(xi).T  # I_kl = 2 eps_{klm} xi^m
    j_amb = 2.0 * _cross_matrix(xi)

    # Gram-Schmidt a tangent basis out of {e1, e2, e3} minus the xi direction
    cols = []
    for e in np.eye(3):
        v = e - np.dot(e, xi) * xi / np.dot(xi, xi)
        for c in cols:
            v = v - np.dot(v, c) * c
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            cols.append(v / nrm)
        if len(cols) == 2:
            break
    basis = np.stack(cols, axis=1)

    return BlochTensors(xi=xi, R=R, I=I, j_ambient=j_amb, tangent_basis=basis)


def bloch_state(theta: float, phi: float) -> PureState:
    """rho(theta, phi) with y^0 = 1/2 and |y| = 1/2 for all angles."""
    st, ct = np.sin(theta), np.cos(theta)
    rho = np.array([[np.sin(theta / 2) ** 2, 0.5 * np.exp(1j * phi) * st],
                    [0.5 * np.exp(-1j * phi) * st, np.cos(theta / 2) ** 2]],
                   dtype=complex)
    return PureState(rho)


def ustar_components(A: np.ndarray) -> tuple[float, np.ndarray]:
    """(y^0, y) of A = y^0 I + y . sigma: y_mu = Tr(sigma_mu A)/2."""
    A = require_square(np.asarray(A, dtype=complex), "A")
    y0 = float(np.trace(A).real) / 2.0
    y = np.array([float(np.trace(s @ A).real) / 2.0 for s in PAULI])
    return y0, y


# ---------------------------------------------------------------------------
# Quadratic-function brackets on the projective space
# ---------------------------------------------------------------------------

def _fval(A: np.ndarray, x: np.ndarray) -> complex:
    """f_A(x) = <x, A x>/<x, x> (the Kahlerian function of A)."""
    return np.vdot(x, A @ x) / np.vdot(x, x)


def _proj_hermitian_pairing(A: np.ndarray, B: np.ndarray, x: np.ndarray) -> complex:
    """h(df_A, df_B) at [x], evaluated from ambient gradients.

    For unit x the ambient gradient of f_A is 2 (A - f_A(x)) x; the Hermitian
    pairing h = g + i omega contracts the gradients (antilinear first slot),
    normalized so that f star g := f g + (1/2) h(df, dg) gives f_A star f_B
    = f_{AB} and hence is associative on Kahlerian functions."""
    x = x / np.sqrt(np.vdot(x, x).real)
    a = _fval(A, x)
    b = _fval(B, x)
    ga = 2.0 * (A @ x - a * x)
    gb = 2.0 * (B @ x - b * x)
    return 0.5 * np.vdot(ga, gb)


def _bilinear_pairing(A: np.ndarray, B: np.ndarray, x: np.ndarray) -> complex:
    """Complex-bilinear extension of the pairing to non-Hermitian arguments."""
    A1, A2 = 0.5 * (A + A.conj().T), 0.5j * (A.conj().T - A)  # A = A1 + i A2
    B1, B2 = 0.5 * (B + B.conj().T), 0.5j * (B.conj().T - B)
    out = 0j
    for Ai, ca in ((A1, 1.0), (A2, 1j)):
        for Bi, cb in ((B1, 1.0), (B2, 1j)):
            out += ca * cb * _proj_hermitian_pairing(Ai, Bi, x)
    return out


def star_product_value(A: np.ndarray, B: np.ndarray, x: np.ndarray) -> complex:
    """(f_A star f_B)(x) = f_A f_B + (1/2) h(df_A, df_B); equals f_{AB}(x)."""
    x = np.asarray(x, dtype=complex).ravel()
    x = x / np.sqrt(np.vdot(x, x).real)
    return _fval(A, x) * _fval(B, x) + 0.5 * _bilinear_pairing(A, B, x)


def quadratic_bracket_check(A: np.ndarray, B: np.ndarray, x: np.ndarray) -> dict:
    """Verify the Lie-Jordan-star identities of Kahlerian functions at [x]:

        {f_A, f_B}_g     = f_{AB+BA}
        {f_A, f_B}_omega = f_{(AB-BA)/i}
        f_A star f_B     = f_{AB}

    The left sides are computed from gradients/Hamiltonian fields and the
    metric/symplectic contractions; the right sides from matrix products.
    Returns the residual report (nothing raises: residuals speak)."""
    A = require_square(np.asarray(A, dtype=complex), "A")
    B = require_square(np.asarray(B, dtype=complex), "B")
    x = np.asarray(x, dtype=complex).ravel()
    x = x / np.sqrt(np.vdot(x, x).real)

    a = _fval(A, x)
    b = _fval(B, x)
    pair = _proj_hermitian_pairing(A, B, x)  # h(df_A, df_B) = g + i omega contraction
    jordan_lhs = pair.real + 2.0 * a.real * b.real
    poisson_lhs = pair.imag
    star_lhs = a * b + 0.5 * _bilinear_pairing(A, B, x)

    AB = A @ B
    jordan_rhs = _fval(AB + B @ A, x).real
    poisson_rhs = _fval((AB - B @ A) / 1j, x).real
    star_rhs = _fval(AB, x)

    return {
        "jordan_lhs": jordan_lhs, "jordan_rhs": jordan_rhs,
        "jordan_residual": abs(jordan_lhs - jordan_rhs),
        "poisson_lhs": poisson_lhs, "poisson_rhs": poisson_rhs,
        "poisson_residual": abs(poisson_lhs - poisson_rhs),
        "star_lhs": star_lhs, "star_rhs": star_rhs,
        "star_residual": abs(star_lhs - star_rhs),
    }


# ---------------------------------------------------------------------------
# GNS construction for B(C^n)
# ---------------------------------------------------------------------------

@dataclass
class GnsRepresentation:
    """GNS data of a rank-m state on B(C^n): H_omega ~ C^n (x) C^m, the
    representation pi(A) = I_m (x) A, the cyclic vector, and the Gelfand ideal
    as the projector onto the support columns."""

    omega: np.ndarray
    dim: int                          # n * m
    rank: int
    support: np.ndarray               # n x m eigenvectors with p_k > 0
    weights: np.ndarray               # the m positive eigenvalues
    cyclic: np.ndarray                # vec of support @ diag(sqrt(p))

    def represent(self, A: np.ndarray) -> np.ndarray:
        """pi(A) = I_m (x) A on column-major vectorized n x m matrices."""
        return np.kron(np.eye(self.rank), np.asarray(A, dtype=complex))

    def embed(self, A: np.ndarray) -> np.ndarray:
        """The class vector Psi_A = vec(A . support . diag(sqrt(p)))."""
        M = np.asarray(A, dtype=complex) @ self.support @ np.diag(np.sqrt(self.weights))
        return M.flatten(order="F")

    def pairing(self, A: np.ndarray, B: np.ndarray) -> complex:
        """<A|B> = omega(A^dag B) = Tr[B omega A^dag]."""
        return complex(np.trace(np.asarray(B) @ self.omega @ np.asarray(A).conj().T))

    def in_gelfand_ideal(self, X: np.ndarray, tol: float = 1e-10) -> bool:
        """X is in the ideal iff it kills every support column."""
        return matrix_norm(np.asarray(X) @ self.support) <= tol * max(1.0, matrix_norm(X))


def gns_construct(omega: np.ndarray, rank_tol: float = 1e-10) -> GnsRepresentation:
    """GNS triple of the state omega(A) = Tr[omega A] on B(C^n).

    For a rank-m density matrix the Hilbert space is m copies of C^n, the
    representation is I_m (x) A, and <Psi_I | pi(A) Psi_I> = Tr[omega A]."""
    omega = require_square(np.asarray(omega, dtype=complex), "omega")
    if not is_hermitian(omega, 1e-10):
        raise NotAState("omega is not Hermitian")
    w, U = np.linalg.eigh(omega)
    if np.min(w) < -rank_tol:
        raise NotAState(f"omega has a negative eigenvalue {np.min(w):.3e}")
    if abs(np.sum(w) - 1.0) > 1e-10:
        raise NotAState(f"Tr omega = {np.sum(w):.12f} != 1")

    mask = w > rank_tol
    p = w[mask]
    supp = U[:, mask]
    n = omega.shape[0]
    m = int(mask.sum())

    rep = GnsRepresentation(omega=omega, dim=n * m, rank=m, support=supp,
                            weights=p, cyclic=np.zeros(n * m, dtype=complex))
    rep.cyclic = rep.embed(np.eye(n))
    return rep


# ---------------------------------------------------------------------------
# K-deformed operator algebra
# ---------------------------------------------------------------------------

def k_deformed_algebra(K: np.ndarray, H: np.ndarray, A: np.ndarray,
                       hbar: float = 1.0, tol: float = 1e-10) -> dict:
    """The deformed product X .K Y = X K Y represents the same dynamics with
    H' = H K^{-1}: [H', A]_K = H' K A - A K H' = [H, A], and d/dt is a
    derivation of .K under dX/dt = [H, X]/(i hbar). Requires [H, K] = 0."""
    K = require_square(np.asarray(K, dtype=complex), "K")
    H = require_square(np.asarray(H, dtype=complex), "H")
    A = np.asarray(A, dtype=complex)
    scale = max(1.0, matrix_norm(H) * matrix_norm(K))
    comm = matrix_norm(H @ K - K @ H)
    if comm > tol * scale:
        raise NotInvariant(f"[H, K] norm {comm:.3e}: K is not a constant of the motion")

    Kinv = np.linalg.inv(K)
    Hp = H @ Kinv
    bracket_resid = matrix_norm((Hp @ K @ A - A @ K @ Hp) - (H @ A - A @ H))

    # derivation of the deformed product at t = 0
    def ddt(X):
        return (H @ X - X @ H) / (1j * hbar)

    B = A.conj().T @ A + np.eye(A.shape[0])  # some second operand
    lhs = ddt(A @ K @ B)
    rhs = ddt(A) @ K @ B + A @ K @ ddt(B)
    derivation_resid = matrix_norm(lhs - rhs)

    return {"H_prime": Hp, "bracket_residual": float(bracket_resid),
            "derivation_residual": float(derivation_resid)}


# ---------------------------------------------------------------------------
# Deformed Fock algebra (truncated)
# ---------------------------------------------------------------------------

@dataclass
class DeformedFock:
    """Truncated nonlinear Fock algebra: A = f(n) a, A^dag = a^dag f(n), and
    the second-structure adjoint (A^dag)^dag_2 = f(n)^{-1} a.

    Levels 0..N; the top level is a truncation artifact and is excluded from
    the commutator assertion."""

    N: int
    f_values: np.ndarray
    a: np.ndarray
    number: np.ndarray
    A: np.ndarray
    A_dag: np.ndarray
    A_dag_dag2: np.ndarray
    basis_scale: np.ndarray  # |n>_2 = basis_scale[n] |n>_1

    def commutator_2(self) -> np.ndarray:
        """[(A^dag)^dag_2, A^dag]; equals I on levels 0..N-1."""
        return self.A_dag_dag2 @ self.A_dag - self.A_dag @ self.A_dag_dag2

    def trace_1(self, O: np.ndarray, levels: int | None = None) -> complex:
        k = self.N if levels is None else levels
        return complex(np.trace(O[:k, :k]))

    def trace_2(self, O: np.ndarray, levels: int | None = None) -> complex:
        """Trace in the second structure: sum_n <n|O|n>_2 with {|n>_2} declared
        orthonormal; in first-structure coordinates this is the trace of
        D^{-1} O D with D = diag(basis_scale)."""
        k = self.N if levels is None else levels
        D = np.diag(self.basis_scale)
        M = np.linalg.solve(D, O @ D)
        return complex(np.trace(M[:k, :k]))


def deformed_fock(f: Callable[[int], float], N: int) -> DeformedFock:
    """Build the truncated deformed Fock algebra for a positive f on {0..N}."""
    if N < 2:
        raise ValueError("need N >= 2 truncation levels")
    fv = np.array([float(f(k)) for k in range(N + 1)])
    if np.any(fv <= 0):
        bad = int(np.argmax(fv <= 0))
        raise ValueError(f"f({bad}) = {fv[bad]} is not positive")

    dim = N + 1
    a = np.zeros((dim, dim))
    for k in range(1, dim):
        a[k - 1, k] = np.sqrt(k)
    number = np.diag(np.arange(dim, dtype=float))
    F = np.diag(fv)
    A = F @ a
    A_dag = a.T @ F
    A_dag_dag2 = np.linalg.solve(F, a)

    # |n>_2 = prod_{k<n} f(k) |n>_1
    scale = np.ones(dim)
    for k in range(1, dim):
        scale[k] = scale[k - 1] * fv[k - 1]

    return DeformedFock(N=N, f_values=fv, a=a, number=number, A=A,
                        A_dag=A_dag, A_dag_dag2=A_dag_dag2, basis_scale=scale)
