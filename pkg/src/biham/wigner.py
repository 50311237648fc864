"""Discretized Weyl systems: the Wigner transform and its inverse on a
phase-space box, phase-point operators, the symplectic Fourier transform,
closed-form oscillator oracles (Mehler kernel, Gibbs Wigner function), and
the classical KMS check.

Grid conventions. Positions x_i = (i - N/2) dx with dx = 2 L_q / N (N even),
momenta p_j = (j - N/2) dp with dp = 2 L_p / N. Kernels carry the quadrature
weight dx (products and traces are dx-weighted). The Wigner transform sums
over the xi-lattice of spacing 2 dx,

    W(q_i, p_j) = 2 dx sum_s K[i+s, i-s] exp(2 i p_j s dx / hbar),

the exact Riemann sum of the continuum formula; it is evaluated as a dense
DFT (a single matrix product) so the q and p grids stay decoupled. Two grid
flavors matter: the "Nyquist" box 2 L_p = pi hbar / dx, on which the
phase-space trace and Hilbert-Schmidt quadratures are exact trigonometric
sums, and the "commensurate" box 2 L_p = 2 pi hbar / dx, on which the
phase-point frame resolves the identity exactly.

Delta-like kernels are honest casualties of the 2 dx lattice: the discrete
identity kernel delta_{mn}/dx transforms to the constant 2, not 1, because
the integer-aligned xi-lattice weights the diagonal fully (the identity is
not band-limited). Smooth, box-decaying kernels see none of this.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from .constants import ModelConstants
from .linalg import matrix_norm
from .polynomials import PhasePolynomial, poisson_bracket_poly

__all__ = [
    "GridError",
    "PhaseGrid",
    "GridFunction",
    "KernelOperator",
    "WignerFunction",
    "symplectic_fourier",
    "wigner_transform",
    "weyl_map",
    "PhasePointFrame",
    "phase_point_frame",
    "mehler_gibbs_kernel",
    "oscillator_gibbs_wigner",
    "oscillator_eigenstate",
    "classical_kms_check",
]


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class PhaseGrid:
    """Even-N phase-space box [-L_q, L_q) x [-L_p, L_p) with model constants."""

    N: int
    L_q: float
    L_p: float
    constants: ModelConstants = field(default_factory=ModelConstants)

    def __post_init__(self):
        if self.N % 2 != 0 or self.N < 4:
            raise GridError(f"N must be even and >= 4, got {self.N}")
        if self.L_q <= 0 or self.L_p <= 0:
            raise GridError("box half-widths must be positive")

    @property
    def dq(self) -> float:
        return 2.0 * self.L_q / self.N

    @property
    def dp(self) -> float:
        return 2.0 * self.L_p / self.N

    @property
    def dx(self) -> float:
        # the kernel position grid coincides with the q grid
        return self.dq

    @property
    def q(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) * self.dq

    @property
    def p(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) * self.dp

    @property
    def x(self) -> np.ndarray:
        return self.q

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q, self.p, indexing="ij")

    @classmethod
    def nyquist(cls, N: int, L_q: float,
                constants: ModelConstants | None = None) -> "PhaseGrid":
        """Momentum box matched to the 2*dx xi-lattice: 2 L_p = pi hbar / dx.

        On this box the p-sum over the full period makes the phase-space
        trace and the Hilbert-Schmidt norm exact trigonometric quadratures."""
        constants = constants or ModelConstants()
        dx = 2.0 * L_q / N
        return cls(N=N, L_q=L_q, L_p=np.pi * constants.hbar / (2.0 * dx),
                   constants=constants)

    @classmethod
    def commensurate(cls, N: int, L_q: float,
                     constants: ModelConstants | None = None) -> "PhaseGrid":
        """dq dp = 2 pi hbar / N; the phase-point frame is exact here."""
        constants = constants or ModelConstants()
        dx = 2.0 * L_q / N
        return cls(N=N, L_q=L_q, L_p=np.pi * constants.hbar / dx,
                   constants=constants)


@dataclass
class GridFunction:
    """Samples f(q_i, p_j) on a PhaseGrid, indexed [i, j]."""

    grid: PhaseGrid
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.shape != (self.grid.N, self.grid.N):
            raise GridError(f"samples of shape {s.shape} on an N={self.grid.N} grid")
        self.samples = s

    @classmethod
    def from_callable(cls, grid: PhaseGrid, func) -> "GridFunction":
        Q, P = grid.meshgrid()
        return cls(grid, np.asarray(func(Q, P), dtype=complex))

    @classmethod
    def from_polynomial(cls, grid: PhaseGrid, poly: PhasePolynomial) -> "GridFunction":
        Q, P = grid.meshgrid()
        return cls(grid, poly.evaluate_grid(Q, P, hbar=grid.constants.hbar))

    def phase_space_trace(self) -> complex:
        """Tr(f) = sum dq dp / (2 pi hbar) f."""
        g = self.grid
        return complex(np.sum(self.samples) * g.dq * g.dp / (2 * np.pi * g.constants.hbar))

    def hs_norm_sq(self) -> float:
        """sum dq dp / (2 pi hbar) |f|^2."""
        g = self.grid
        return float(np.sum(np.abs(self.samples) ** 2) * g.dq * g.dp
                     / (2 * np.pi * g.constants.hbar))

    def is_real(self, tol: float = 1e-10) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.samples))))
        return float(np.max(np.abs(self.samples.imag))) <= tol * scale

    def to_binary(self, path: str) -> str:
        """Binary column format: q, p axes and Re/Im sample columns (.npz)."""
        np.savez_compressed(path, q=self.grid.q, p=self.grid.p,
                            re=self.samples.real, im=self.samples.imag,
                            hbar=self.grid.constants.hbar)
        return path if path.endswith(".npz") else path + ".npz"

    @classmethod
    def from_binary(cls, path: str, constants: ModelConstants | None = None) -> "GridFunction":
        data = np.load(path)
        q, p = data["q"], data["p"]
        c = constants or ModelConstants(hbar=float(data["hbar"]) if "hbar" in data else 1.0)
        grid = PhaseGrid(N=len(q), L_q=float(-q[0]), L_p=float(-p[0]), constants=c)
        return cls(grid, data["re"] + 1j * data["im"])

    def flipped_p(self) -> "GridFunction":
        """f(q, p) -> f(q, -p) on the grid (the momentum-sign switch)."""
        out = np.empty_like(self.samples)
        out[:, 1:] = self.samples[:, :0:-1]
        out[:, 0] = self.samples[:, 0]  # -L_p endpoint has no mirror; keep
        return GridFunction(self.grid, out)


class WignerFunction(GridFunction):
    """A GridFunction arising from a Hermitian kernel: real within tolerance
    and uniformly bounded by 2 Tr|O| for trace-class inputs."""


@dataclass
class KernelOperator:
    """Discretized operator kernel <x_i|O|x_j> with quadrature weight dx."""

    grid: PhaseGrid
    kernel: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=complex)
        if k.shape != (self.grid.N, self.grid.N):
            raise GridError(f"kernel of shape {k.shape} on an N={self.grid.N} grid")
        self.kernel = k

    @classmethod
    def identity(cls, grid: PhaseGrid) -> "KernelOperator":
        return cls(grid, np.eye(grid.N) / grid.dx)

    @classmethod
    def projector(cls, grid: PhaseGrid, psi: np.ndarray) -> "KernelOperator":
        """|psi><psi| for a wavefunction sampled on the x grid (dx-normalized)."""
        psi = np.asarray(psi, dtype=complex)
        nrm = np.sum(np.abs(psi) ** 2) * grid.dx
        return cls(grid, np.outer(psi, psi.conj()) / nrm)

    def compose(self, other: "KernelOperator") -> "KernelOperator":
        return KernelOperator(self.grid, self.kernel @ other.kernel * self.grid.dx)

    def trace(self) -> complex:
        return complex(np.trace(self.kernel) * self.grid.dx)

    def hs_norm_sq(self) -> float:
        """Tr(O^dag O) with dx weights."""
        return float(np.sum(np.abs(self.kernel) ** 2) * self.grid.dx ** 2)

    def adjoint(self) -> "KernelOperator":
        return KernelOperator(self.grid, self.kernel.conj().T)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        scale = max(1.0, matrix_norm(self.kernel))
        return matrix_norm(self.kernel - self.kernel.conj().T) <= tol * scale

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.kernel @ np.asarray(psi, dtype=complex) * self.grid.dx

    def to_csv_rows(self):
        """Rows (x, x', Re, Im) for the kernel CSV wire format."""
        x = self.grid.x
        for i in range(self.grid.N):
            for j in range(self.grid.N):
                z = self.kernel[i, j]
                yield (float(x[i]), float(x[j]), float(z.real), float(z.imag))

    def boundary_leakage(self) -> float:
        """Relative kernel weight in the outer eighth of the box; the Wigner
        quadrature is only trustworthy when this is negligible."""
        N = self.grid.N
        edge = max(1, N // 8)
        total = float(np.max(np.abs(self.kernel)))
        if total == 0:
            return 0.0
        rim = np.abs(np.concatenate([
            self.kernel[:edge].ravel(), self.kernel[-edge:].ravel(),
            self.kernel[:, :edge].ravel(), self.kernel[:, -edge:].ravel()]))
        return float(np.max(rim)) / total


# ---------------------------------------------------------------------------
# Symplectic Fourier transform (unscaled; hbar enters only at the Weyl map)
# ---------------------------------------------------------------------------

def _dual_grid(grid: PhaseGrid) -> PhaseGrid:
    N = grid.N
    d_eta = 2 * np.pi / (N * grid.dq)
    d_xi = 2 * np.pi / (N * grid.dp)
    return PhaseGrid(N=N, L_q=N * d_eta / 2, L_p=N * d_xi / 2, constants=grid.constants)


def symplectic_fourier(f: GridFunction, inverse: bool = False) -> GridFunction:
    """F_s(f)(eta, xi) = int dq dp / 2pi f(q, p) e^{-i (q eta - p xi)}.

    Forward output lives on the dual grid (eta spacing 2pi/(N dq), xi spacing
    2pi/(N dp)); on that pairing the quadrature is an exact DFT, so
    inverse(forward(f)) reproduces f to rounding. The inverse synthesizes
    f(q, p) = int deta dxi / 2pi F(eta, xi) e^{+i (q eta - p xi)}."""
    g = f.grid
    out_grid = _dual_grid(g)
    if not inverse:
        E1 = np.exp(-1j * np.outer(out_grid.q, g.q))   # [eta, q]
        E2 = np.exp(+1j * np.outer(g.p, out_grid.p))   # [p, xi]
    else:
        E1 = np.exp(+1j * np.outer(out_grid.q, g.q))   # [q, eta]
        E2 = np.exp(-1j * np.outer(g.p, out_grid.p))   # [xi, p]
    measure = g.dq * g.dp / (2 * np.pi)
    return GridFunction(out_grid, measure * (E1 @ f.samples @ E2))


def plane_wave_synthesis(F: GridFunction) -> GridFunction:
    """sum d_xi d_eta / 2pi F(eta, xi) e^{i (xi p + eta q)}; applied to
    F_s(f) this reproduces f(q, -p) (the symplectic-transform sign trade)."""
    g = F.grid
    out_grid = _dual_grid(g)
    q = out_grid.q
    p = out_grid.p
    eta = g.q
    xi = g.p
    Eq = np.exp(1j * np.outer(q, eta))
    Ep = np.exp(1j * np.outer(xi, p))
    measure = g.dq * g.dp / (2 * np.pi)
    return GridFunction(out_grid, measure * (Eq @ F.samples @ Ep))


# ---------------------------------------------------------------------------
# Wigner transform and Weyl map
# ---------------------------------------------------------------------------

def _xi_lattice_rotation(K: np.ndarray) -> np.ndarray:
    """R[i, s+N-1] = K[i+s, i-s] zero-padded outside the box (s = -(N-1)..N-1)."""
    N = K.shape[0]
    R = np.zeros((N, 2 * N - 1), dtype=complex)
    for s in range(-(N - 1), N):
        lo, hi = abs(s), N - abs(s)
        if lo >= hi:
            continue
        i = np.arange(lo, hi)
        R[i, s + N - 1] = K[i + s, i - s]
    return R


def wigner_transform(O: KernelOperator, check_boundary: bool = True) -> WignerFunction:
    """W(q_i, p_j) = 2 dx sum_s <x_{i+s}|O|x_{i-s}> e^{2 i p_j s dx / hbar}.

    Exact Riemann sum of the Wigner formula over the xi-lattice of spacing
    2 dx, computed as one dense matrix product. A boundary-leakage warning
    is attached to the result when the kernel does not decay in the box."""
    g = O.grid
    N = g.N
    hbar = g.constants.hbar
    R = _xi_lattice_rotation(O.kernel)
    s = np.arange(-(N - 1), N)
    phases = np.exp(2j * np.outer(s, g.p) * g.dx / hbar)
    W = 2.0 * g.dx * (R @ phases)
    out = WignerFunction(g, W)
    out.boundary_warning = (O.boundary_leakage() > 1e-8) if check_boundary else False
    return out


def _midpoint_interpolate(samples: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation of f(q, p) onto the half-spaced q lattice.

    Returns fmid[c, j] = f(((c - N)/2) dq, p_j) for c = 0..2N-1; exact for
    q-band-limited (periodized) data, which is the regime the Weyl map is
    specified in."""
    N = samples.shape[0]
    up = scipy.signal.resample(samples, 2 * N, axis=0)
    return up


def weyl_map(f: GridFunction) -> KernelOperator:
    """<x_m|O|x_n> = sum_j dp/(2 pi hbar) e^{-i p_j (x_m - x_n)/hbar}
    f((x_m + x_n)/2, p_j); the left inverse of wigner_transform on
    band-limited inputs. Midpoints off the q grid are filled by trigonometric
    interpolation."""
    g = f.grid
    N = g.N
    hbar = g.constants.hbar
    fmid = _midpoint_interpolate(f.samples)  # index c = m + n
    d = np.arange(-(N - 1), N)
    phases = np.exp(-1j * np.outer(g.p, d) * g.dx / hbar)  # [j, d]
    # G[c, d] = sum_j fmid[c, j] phases[j, d]
    G = fmid[: 2 * N - 1] @ phases
    K = np.empty((N, N), dtype=complex)
    m = np.arange(N)
    for n in range(N):
        K[:, n] = G[m + n, (m - n) + N - 1]
    K *= g.dp / (2 * np.pi * hbar)
    return KernelOperator(g, K)


# ---------------------------------------------------------------------------
# Phase-point operators
# ---------------------------------------------------------------------------

class PhasePointFrame:
    """Discrete phase-point operators A(q_i, p_j).

    Normalized to unit dx-trace:
        <x_m|A(q_i, p_j)|x_n> = [m + n = 2i] e^{i p_j (x_n - x_m)/hbar} / dx,
    so Tr A = 1 exactly and coefficients(O) = 2 Tr(O A(q, p)) coincides with
    the Wigner transform exactly on any grid (the factor 2 is the diagonal
    weight of the integer-aligned lattice and cannot be normalized away).

    Grid flavors split the remaining continuum identities. On the
    commensurate box (dq dp = 2 pi hbar / N) the frame resolves the identity,
    sum_{ij} A(q_i, p_j) dq dp/(2 pi hbar) = I, and trace orthogonality
    Tr(A(z) A(z')) = 2 pi hbar delta_zz' / (dq dp) holds up to O(1/N)
    boundary truncation. On the Nyquist box expand(coefficients(O))
    reconstructs the even checkerboard of O exactly (the frame spans only
    pairs with m + n even; the odd part is invisible to it).
    """

    def __init__(self, grid: PhaseGrid):
        if grid.N % 2 != 0:
            raise GridError("phase-point frame needs even N")
        self.grid = grid

    def operator(self, i: int, j: int) -> KernelOperator:
        g = self.grid
        N = g.N
        hbar = g.constants.hbar
        pj = g.p[j]
        m = np.arange(N)
        A = np.zeros((N, N), dtype=complex)
        n = 2 * i - m
        ok = (n >= 0) & (n < N)
        A[m[ok], n[ok]] = np.exp(1j * pj * (g.x[n[ok]] - g.x[m[ok]]) / hbar) / g.dx
        return KernelOperator(g, A)

    def coefficients(self, O: KernelOperator) -> WignerFunction:
        """2 Tr(O A(q_i, p_j)) for all grid points; equals wigner_transform(O)."""
        g = self.grid
        N = g.N
        hbar = g.constants.hbar
        R = _xi_lattice_rotation(O.kernel)
        s = np.arange(-(N - 1), N)
        phases = np.exp(2j * np.outer(s, g.p) * g.dx / hbar)
        return WignerFunction(g, 2.0 * g.dx * (R @ phases))

    def expand(self, f: GridFunction) -> KernelOperator:
        """sum_{ij} f[i, j] A(q_i, p_j) dq dp / (2 pi hbar).

        Applied to the Wigner function of O on the Nyquist box this returns
        the even-checkerboard part of O exactly; on the commensurate box it
        returns twice that (the p-grid covers two lattice periods there)."""
        g = self.grid
        N = g.N
        hbar = g.constants.hbar
        w = g.dq * g.dp / (2 * np.pi * hbar)
        d = np.arange(-(N - 1), N)
        phases = np.exp(-1j * np.outer(g.p, d) * g.dx / hbar)  # [j, d]
        G = f.samples @ phases  # [i, d]
        K = np.zeros((N, N), dtype=complex)
        m = np.arange(N)
        for n in range(N):
            c = m + n
            even = (c % 2 == 0)
            i = c[even] // 2
            K[m[even], n] = G[i, (m[even] - n) + N - 1]
        K *= w / g.dx
        return KernelOperator(g, K)


def phase_point_frame(grid: PhaseGrid) -> PhasePointFrame:
    return PhasePointFrame(grid)


# ---------------------------------------------------------------------------
# Oscillator oracles
# ---------------------------------------------------------------------------

def mehler_gibbs_kernel(grid: PhaseGrid) -> KernelOperator:
    """<x|exp(-beta H)|x'> for H = P^2/2m + m w^2 Q^2 / 2, via Mehler's formula:

    sqrt(m w / pi hbar) e^{-(z^2+z'^2)/2} sqrt(z0/(1-z0^2))
        exp[(2 z0 z z' - z0^2 (z^2 + z'^2)) / (1 - z0^2)],
    z = x sqrt(m w / hbar), z0 = e^{-beta hbar w}."""
    c = grid.constants
    z0 = np.exp(-c.beta * c.hbar * c.omega)
    zeta = grid.x * np.sqrt(c.mass * c.omega / c.hbar)
    Z, Zp = np.meshgrid(zeta, zeta, indexing="ij")
    pref = np.sqrt(c.mass * c.omega / (np.pi * c.hbar)) * np.sqrt(z0 / (1.0 - z0 ** 2))
    expo = -(Z ** 2 + Zp ** 2) / 2.0 \
        + (2.0 * z0 * Z * Zp - z0 ** 2 * (Z ** 2 + Zp ** 2)) / (1.0 - z0 ** 2)
    return KernelOperator(grid, pref * np.exp(expo))


def oscillator_gibbs_wigner(constants: ModelConstants,
                            grid: PhaseGrid | None = None,
                            N: int = 256, L_q: float | None = None) -> dict:
    """Closed-form Gibbs Wigner function of the harmonic oscillator:

    W(q, p) = sech(beta hbar w / 2)
              exp{-tanh(beta hbar w / 2) [m w q^2/hbar + p^2/(m hbar w)]}

    with phase-space trace 1 / (2 sinh(beta hbar w / 2)). Returns the sampled
    GridFunction plus the scalars (center value, exact and quadrature traces)."""
    c = constants
    if grid is None:
        if L_q is None:
            # cover 12 thermal widths, but never starve the Nyquist momentum
            # box: the balanced square box sqrt(pi hbar N / (4 m omega))
            # splits the N grid points evenly between the two directions
            th = np.tanh(c.beta_hbar_omega / 2.0)
            width = 12.0 * np.sqrt(c.hbar / (c.mass * c.omega * max(th, 1e-8)))
            balanced = np.sqrt(np.pi * c.hbar * N / (4.0 * c.mass * c.omega))
            L_q = float(min(width, balanced))
        grid = PhaseGrid.nyquist(N, L_q, c)
    t = np.tanh(c.beta_hbar_omega / 2.0)
    Q, P = grid.meshgrid()
    W = (1.0 / np.cosh(c.beta_hbar_omega / 2.0)) * np.exp(
        -t * (c.mass * c.omega * Q ** 2 / c.hbar + P ** 2 / (c.mass * c.hbar * c.omega)))
    gf = GridFunction(grid, W)
    exact_trace = 1.0 / (2.0 * np.sinh(c.beta_hbar_omega / 2.0))
    return {
        "wigner": gf,
        "center_value": float(1.0 / np.cosh(c.beta_hbar_omega / 2.0)),
        "trace_exact": float(exact_trace),
        "trace_quadrature": float(gf.phase_space_trace().real),
    }


def oscillator_eigenstate(n: int, grid: PhaseGrid) -> np.ndarray:
    """n-th HO eigenfunction sampled on the x grid, dx-normalized."""
    c = grid.constants
    zeta = grid.x * np.sqrt(c.mass * c.omega / c.hbar)
    coef = np.zeros(n + 1)
    coef[n] = 1.0
    Hn = np.polynomial.hermite.hermval(zeta, coef)
    psi = Hn * np.exp(-zeta ** 2 / 2.0)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return psi.astype(complex)


# ---------------------------------------------------------------------------
# Classical KMS check
# ---------------------------------------------------------------------------

def classical_kms_check(H: PhasePolynomial, f: PhasePolynomial, g: PhasePolynomial,
                        beta: float, grid: PhaseGrid) -> dict:
    """Residual of the classical KMS identity at t = 0,

        omega({f, g}) = beta * omega(g {f, H}),

    with omega(.) the normalized Gibbs quadrature exp(-beta H) dq dp over the
    box. Brackets are computed exactly on polynomials; only the quadrature is
    approximate. Returns both sides, the residual and a decay estimate."""
    if not (H.n_dof == f.n_dof == g.n_dof == 1):
        raise ValueError("KMS check is implemented for one degree of freedom")
    Q, P = grid.meshgrid()
    hbar = grid.constants.hbar
    weight = np.exp(-beta * np.real(H.evaluate_grid(Q, P, hbar)))
    Z = float(np.sum(weight)) * grid.dq * grid.dp
    if Z <= 0:
        raise GridError("Gibbs weight vanished on the box")
    edge = float(np.max([weight[0].max(), weight[-1].max(),
                         weight[:, 0].max(), weight[:, -1].max()]))
    decay = edge / float(np.max(weight))

    def avg(poly: PhasePolynomial) -> float:
        vals = np.real(poly.evaluate_grid(Q, P, hbar))
        return float(np.sum(vals * weight)) * grid.dq * grid.dp / Z

    lhs = avg(poisson_bracket_poly(f, g))
    rhs = beta * avg(g * poisson_bracket_poly(f, H))
    report = {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs),
              "boundary_decay": decay, "accuracy_warning": decay > 1e-10}
    return report
