"""Nijenhuis torsion for (1,1) tensor fields and algebra endomorphisms,
factorizable recursion operators T = omega_1^{-1} o omega_2, invariant chains
of Hamiltonians in involution, Hochschild star-products, and Schouten
brackets of polynomial bivectors.

Tensor components are polynomials so that every derivative entering the
torsion is exact; general callables are deliberately out of scope.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import is_skew_symmetric, matrix_norm, require_square, skew_part, symmetric_part
from .lineardyn import QuadraticHamiltonian, involution_residual
from .polynomials import PhasePolynomial

__all__ = [
    "InconsistentChain",
    "TensorField11",
    "PolyBivector",
    "AlgebraEndomorphism",
    "RecursionVerdict",
    "nijenhuis_torsion",
    "nijenhuis_torsion_poly",
    "recursion_from_pair",
    "invariant_chain",
    "hochschild_star",
    "derivation_test",
    "algebra_torsion",
    "schouten_bracket",
]


class InconsistentChain(ValueError):
    """The chain premise failed: T~ dH is not closed, or the generated
    Hamiltonians are not in involution (T is not admissible for this pair).
    Carries the offending residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def _as_poly(entry, n_vars: int) -> PhasePolynomial:
    """Coerce scalars to constant polynomials over n_vars coordinates.

    Tensor fields live on R^n with coordinates x^1..x^n; we reuse the
    phase-space polynomial ring with 2*n_dof slots by padding, using the
    first n slots as x^1..x^n."""
    n_dof = (n_vars + 1) // 2
    if isinstance(entry, PhasePolynomial):
        if 2 * entry.n_dof < n_vars:
            raise ValueError("polynomial ring too small for the tensor dimension")
        return entry
    return PhasePolynomial.constant(n_dof, complex(entry))


@dataclass
class TensorField11:
    """(1,1) tensor T^i_j on R^n with constant or polynomial components.

    Polynomial entries use the first n variable slots of a PhasePolynomial
    ring of at least n variables."""

    n: int
    components: np.ndarray  # object array of PhasePolynomial, or float array

    @classmethod
    def constant(cls, M: np.ndarray) -> "TensorField11":
        M = require_square(np.asarray(M, dtype=float), "T")
        return cls(n=M.shape[0], components=M)

    @classmethod
    def from_polynomials(cls, entries) -> "TensorField11":
        arr = np.array(entries, dtype=object)
        n = arr.shape[0]
        if arr.shape != (n, n):
            raise ValueError("component array must be square")
        ring = max((e.n_dof for row in arr for e in row
                    if isinstance(e, PhasePolynomial)), default=(n + 1) // 2)
        out = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                e = arr[i, j]
                out[i, j] = e if isinstance(e, PhasePolynomial) \
                    else PhasePolynomial.constant(ring, complex(e))
        return cls(n=n, components=out)

    @property
    def is_constant(self) -> bool:
        return self.components.dtype != object

    def entry(self, i: int, j: int) -> PhasePolynomial:
        if self.is_constant:
            return _as_poly(float(self.components[i, j]), self.n)
        return self.components[i, j]

    def matrix(self) -> np.ndarray:
        if not self.is_constant:
            raise ValueError("tensor field has non-constant components")
        return self.components


def _pad_point(x, n_dof: int) -> list[float]:
    x = list(x)
    return x + [0.0] * (2 * n_dof - len(x))


def nijenhuis_torsion_poly(T: TensorField11) -> np.ndarray:
    """Symbolic torsion components N^i_{km} as polynomials:

    N^i_km = dT^i_k/dx^j T^j_m + T^i_j dT^j_m/dx^k - (k <-> m).
    """
    n = T.n
    if T.is_constant:
        ring = (n + 1) // 2
        zero = PhasePolynomial.zero(ring)
        out = np.empty((n, n, n), dtype=object)
        out[...] = zero
        return out

    comp = T.components
    ring = comp[0, 0].n_dof
    out = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for k in range(n):
            for m in range(k, n):
                acc = PhasePolynomial.zero(ring)
                for j in range(n):
                    acc = acc + comp[i, k].diff(j) * comp[j, m] \
                              + comp[i, j] * comp[j, m].diff(k) \
                              - comp[i, m].diff(j) * comp[j, k] \
                              - comp[i, j] * comp[j, k].diff(m)
                out[i, k, m] = acc
                out[i, m, k] = -acc
    return out


def nijenhuis_torsion(T: TensorField11, x) -> np.ndarray:
    """Torsion components N^i_{km}(x), evaluated exactly from polynomial
    derivatives (identically zero for constant T)."""
    n = T.n
    if T.is_constant:
        return np.zeros((n, n, n))
    sym = nijenhuis_torsion_poly(T)
    ring = T.components[0, 0].n_dof
    pt = _pad_point(x, ring)
    out = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        for k in range(n):
            for m in range(n):
                out[i, k, m] = sym[i, k, m].evaluate(pt)
    if np.allclose(out.imag, 0):
        out = out.real
    return out


@dataclass
class RecursionVerdict:
    strong: bool
    torsion_free: bool
    omega_compatible: bool           # T^t omega_1 = omega_1 T
    closed: bool                     # d(T~ o omega_1) = 0, automatic for constant T
    kernel_dim: int
    compatibility_residual: float


def recursion_from_pair(omega1: np.ndarray, omega2: np.ndarray,
                        tol: float = 1e-10) -> tuple[TensorField11, RecursionVerdict]:
    """Factorizable recursion operator T = omega_1^{-1} omega_2.

    For constant forms the torsion vanishes and T~ o omega_1 = omega_2 is
    closed automatically, so T is strong iff T^t omega_1 = omega_1 T, which
    holds by construction; the verdict reports the actual residual.
    Ker(T) = Ker(omega_2)."""
    om1 = require_square(np.asarray(omega1, dtype=float), "omega1")
    om2 = require_square(np.asarray(omega2, dtype=float), "omega2")
    if not is_skew_symmetric(om1, 1e-12) or not is_skew_symmetric(om2, 1e-12):
        raise ValueError("both forms must be skew-symmetric")
    if abs(np.linalg.det(om1)) < 1e-300 or np.linalg.cond(om1) > 1e14:
        raise np.linalg.LinAlgError("omega_1 is singular")

    Tm = np.linalg.solve(om1, om2)
    resid = matrix_norm(Tm.T @ om1 - om1 @ Tm)
    omega_compatible = resid <= tol * max(1.0, matrix_norm(om1) * matrix_norm(Tm))
    kernel_dim = om2.shape[0] - np.linalg.matrix_rank(om2, tol=1e-10 * max(1.0, matrix_norm(om2)))
    verdict = RecursionVerdict(strong=omega_compatible, torsion_free=True,
                               omega_compatible=omega_compatible, closed=True,
                               kernel_dim=int(kernel_dim),
                               compatibility_residual=float(resid))
    return TensorField11.constant(Tm), verdict


def invariant_chain(T: TensorField11, omega: np.ndarray, H: QuadraticHamiltonian,
                    kmax: int, tol: float = 1e-10) -> dict:
    """Chain H_k with matrix sym((T^t)^k H); T~^k dH = dH_k for quadratic H.

    For admissible T (T^t omega = omega T) the antisymmetric part of (T^t)^k H
    vanishes (asserted <= 1e-12 relative) and the H_k are pairwise in
    involution w.r.t. omega. The chain reports the first index at which
    dH_k ^ dH_0 = 0, i.e. H_k becomes proportional to H_0 and the process stops."""
    Tm = T.matrix()
    om = require_square(np.asarray(omega, dtype=float))
    Lam = np.linalg.inv(om)
    H0 = H.H

    hams: list[QuadraticHamiltonian] = []
    skew_resids: list[float] = []
    TT = np.eye(Tm.shape[0])
    for _ in range(kmax + 1):
        Hk = TT @ H0
        skew_norm = matrix_norm(skew_part(Hk))
        skew_resids.append(float(skew_norm))
        if skew_norm > 1e-12 * max(1.0, matrix_norm(Hk)):
            # T~^k dH is not closed: no Hamiltonian exists at this order
            raise InconsistentChain(
                "T~^k dH is not exact (T is not H-weak for this Hamiltonian)",
                float(skew_norm))
        hams.append(QuadraticHamiltonian(symmetric_part(Hk)))
        TT = Tm.T @ TT

    m = len(hams)
    inv = np.zeros((m, m))
    for a in range(m):
        for b in range(m):
            inv[a, b] = involution_residual(hams[a].H, hams[b].H, Lam)
    worst = float(np.max(inv))
    if worst > tol * max(1.0, max(matrix_norm(h.H) for h in hams) ** 2):
        raise InconsistentChain("chain Hamiltonians failed involution", worst)

    # stop index: dH_k ^ dH_0 = 0 iff H_k is proportional to H_0
    stop = None
    n0 = matrix_norm(H0)
    for k in range(1, m):
        Hk = hams[k].H
        c = np.tensordot(Hk, H0) / (n0 ** 2)
        if matrix_norm(Hk - c * H0) <= 1e-10 * max(1.0, matrix_norm(Hk)):
            stop = k
            break

    return {"hamiltonians": hams, "involution_residuals": inv,
            "skew_residuals": skew_resids, "stops_at": stop}


# ---------------------------------------------------------------------------
# Nijenhuis calculus on associative matrix algebras
# ---------------------------------------------------------------------------

@dataclass
class AlgebraEndomorphism:
    """Linear map on M_n(C), given as left multiplication by K or as a
    general linear map on the (column-major) vectorized algebra."""

    n: int
    K: np.ndarray | None = None
    L: np.ndarray | None = None   # n^2 x n^2 acting on vec(A)

    @classmethod
    def left_multiplication(cls, K: np.ndarray) -> "AlgebraEndomorphism":
        K = require_square(np.asarray(K, dtype=complex), "K")
        return cls(n=K.shape[0], K=K)

    @classmethod
    def inner_derivation(cls, X: np.ndarray) -> "AlgebraEndomorphism":
        """T(A) = [X, A] = XA - AX, as a vectorized linear map."""
        X = require_square(np.asarray(X, dtype=complex), "X")
        n = X.shape[0]
        eye = np.eye(n)
        L = np.kron(eye, X) - np.kron(X.T, eye)
        return cls(n=n, L=L)

    @classmethod
    def from_map(cls, n: int, L: np.ndarray) -> "AlgebraEndomorphism":
        L = require_square(np.asarray(L, dtype=complex), "L")
        if L.shape[0] != n * n:
            raise ValueError("vectorized map must be n^2 x n^2")
        return cls(n=n, L=L)

    def __call__(self, A: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=complex)
        if self.K is not None:
            return self.K @ A
        return (self.L @ A.flatten(order="F")).reshape(self.n, self.n, order="F")


def hochschild_star(T: AlgebraEndomorphism, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a *_T b = T(a) b + a T(b) - T(ab): the Hochschild coboundary of T."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (T.n, T.n) or b.shape != (T.n, T.n):
        raise ValueError("operands must live in the same matrix algebra as T")
    return T(a) @ b + a @ T(b) - T(a @ b)


def derivation_test(T: AlgebraEndomorphism, tol: float = 1e-12) -> bool:
    """True iff *_T vanishes on a basis, i.e. T is a one-cocycle (a derivation)."""
    n = T.n
    scale = 1.0
    if T.K is not None:
        scale = max(1.0, matrix_norm(T.K))
    elif T.L is not None:
        scale = max(1.0, matrix_norm(T.L))
    basis = [(i, j) for i in range(n) for j in range(n)]
    for (i, j), (k, l) in itertools.product(basis, basis):
        E1 = np.zeros((n, n), dtype=complex)
        E2 = np.zeros((n, n), dtype=complex)
        E1[i, j] = 1.0
        E2[k, l] = 1.0
        if matrix_norm(hochschild_star(T, E1, E2)) > tol * scale:
            return False
    return True


def algebra_torsion(T: AlgebraEndomorphism, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """N_T(a, b) = T(a *_T b) - T(a) T(b): the obstruction for T to be a
    homomorphism from *_T to the original product."""
    return T(hochschild_star(T, a, b)) - T(a) @ T(b)


# ---------------------------------------------------------------------------
# Schouten brackets of polynomial bivectors
# ---------------------------------------------------------------------------

@dataclass
class PolyBivector:
    """Bivector Lambda = sum_{i<j} Lambda^{ij}(x) d_i ^ d_j with polynomial
    coefficients; stored as the upper-triangular dict {(i, j): poly}."""

    n: int
    upper: dict[tuple[int, int], PhasePolynomial] = field(default_factory=dict)

    @classmethod
    def from_matrix(cls, n: int, comp) -> "PolyBivector":
        """From a full antisymmetric component array (entries: polys or scalars)."""
        upper = {}
        for i in range(n):
            for j in range(i + 1, n):
                a = _as_poly(comp[i][j], n)
                b = _as_poly(comp[j][i], n)
                if (a + b).coefficient_norm() > 1e-12 * max(1.0, a.coefficient_norm()):
                    raise ValueError(f"components ({i},{j}) not antisymmetric")
                if a.terms:
                    upper[(i, j)] = a
        return cls(n=n, upper=upper)

    @classmethod
    def standard_poisson(cls, n_dof: int) -> "PolyBivector":
        """d_{q_i} ^ d_{p_i} summed over i, on R^{2 n_dof} ordered (q..., p...)."""
        n = 2 * n_dof
        one = PhasePolynomial.one((n + 1) // 2)
        return cls(n=n, upper={(i, n_dof + i): one for i in range(n_dof)})

    def scaled(self, k: PhasePolynomial) -> "PolyBivector":
        """Conformal bivector k * Lambda."""
        return PolyBivector(self.n, {ij: k * c for ij, c in self.upper.items()})


class PolyTrivector:
    """Totally antisymmetric (3,0) tensor with polynomial components, stored
    on strictly increasing index triples."""

    def __init__(self, n: int):
        self.n = n
        self.comp: dict[tuple[int, int, int], PhasePolynomial] = {}

    def add(self, i: int, j: int, k: int, poly: PhasePolynomial) -> None:
        if poly.terms == {}:
            return
        if i == j or j == k or i == k:
            return
        # bubble-sort the triple, tracking the permutation parity
        idx = [i, j, k]
        sign = 1
        for a in (0, 1, 0):
            if idx[a] > idx[a + 1]:
                idx[a], idx[a + 1] = idx[a + 1], idx[a]
                sign = -sign
        if sign < 0:
            poly = -poly
        key = (idx[0], idx[1], idx[2])
        cur = self.comp.get(key)
        self.comp[key] = poly if cur is None else cur + poly
        if self.comp[key].terms == {}:
            del self.comp[key]

    def is_zero(self) -> bool:
        return not self.comp

    def __eq__(self, other):
        return isinstance(other, PolyTrivector) and self.n == other.n and self.comp == other.comp


def schouten_bracket(A: PolyBivector, B: PolyBivector) -> PolyTrivector:
    """[A, B]_S for polynomial bivectors, from the monomial expansion

    [f di^dj, g dk^dl]_S = f (d_j g) di^dk^dl - f (d_i g) dj^dk^dl
                         + g (d_l f) di^dj^dk - g (d_k f) di^dj^dl

    (coordinate fields commute, so the [chi, eta] terms drop). Graded
    symmetric on bivectors; [Lambda, Lambda]_S = 0 is the Jacobi identity."""
    if A.n != B.n:
        raise ValueError("bivectors live on different spaces")
    out = PolyTrivector(A.n)
    for (i, j), f in A.upper.items():
        for (k, l), g in B.upper.items():
            out.add(i, k, l, f * g.diff(j))
            out.add(j, k, l, -(f * g.diff(i)))
            out.add(i, j, k, g * f.diff(l))
            out.add(i, j, l, -(g * f.diff(k)))
    return out


def wedge_vector_bivector(X: dict[int, PhasePolynomial], B: PolyBivector) -> PolyTrivector:
    """X ^ B for a vector field X = X^i d_i (dict of polynomial components)."""
    out = PolyTrivector(B.n)
    for i, xi in X.items():
        for (j, k), c in B.upper.items():
            out.add(i, j, k, xi * c)
    return out
