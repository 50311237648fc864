"""Weyl-Wigner engine: transforms, phase-point frame, oscillator oracles, KMS."""

import numpy as np
import pytest

from biham.constants import ModelConstants
from biham.polynomials import PhasePolynomial as P
from biham.wigner import (
    GridError,
    GridFunction,
    KernelOperator,
    PhaseGrid,
    classical_kms_check,
    mehler_gibbs_kernel,
    oscillator_eigenstate,
    oscillator_gibbs_wigner,
    phase_point_frame,
    plane_wave_synthesis,
    symplectic_fourier,
    weyl_map,
    wigner_transform,
)


@pytest.fixture(scope="module")
def grid():
    return PhaseGrid.nyquist(128, 10.0, ModelConstants())


@pytest.fixture(scope="module")
def ho_basis(grid):
    return np.stack([oscillator_eigenstate(n, grid) for n in range(10)], axis=1)


def smooth_kernel(grid, ho_basis, seed, herm=True):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
    if herm:
        M = M + M.conj().T
    return KernelOperator(grid, ho_basis @ M @ ho_basis.conj().T)


# -- grids -------------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(GridError):
        PhaseGrid(N=5, L_q=1.0, L_p=1.0)
    with pytest.raises(GridError):
        PhaseGrid(N=8, L_q=-1.0, L_p=1.0)


def test_nyquist_and_commensurate_spacings():
    c = ModelConstants(hbar=0.7)
    g1 = PhaseGrid.nyquist(64, 4.0, c)
    assert g1.dp * g1.dx * 64 == pytest.approx(np.pi * 0.7)
    g2 = PhaseGrid.commensurate(64, 4.0, c)
    assert g2.dp * g2.dx * 64 == pytest.approx(2 * np.pi * 0.7)


# -- symplectic Fourier --------------------------------------------------------

def test_sft_gaussian_self_dual():
    g = PhaseGrid(64, 8.0, 8.0, ModelConstants())
    f = GridFunction.from_callable(g, lambda Q, Pm: np.exp(-(Q ** 2 + Pm ** 2) / 2))
    F = symplectic_fourier(f)
    Qd, Pd = F.grid.meshgrid()
    # oracle: direct quadrature of the defining integral at sample points
    Q, Pm = g.meshgrid()
    for (i, j) in [(7, 9), (20, 40), (32, 32), (50, 11)]:
        eta, xi = Qd[i, 0], Pd[0, j]
        direct = np.sum(f.samples * np.exp(-1j * (Q * eta - Pm * xi))) \
            * g.dq * g.dp / (2 * np.pi)
        assert F.samples[i, j] == pytest.approx(direct, abs=1e-12)
        assert F.samples[i, j] == pytest.approx(np.exp(-(eta ** 2 + xi ** 2) / 2), abs=1e-12)


def test_sft_linearity_and_round_trip():
    g = PhaseGrid(64, 8.0, 8.0, ModelConstants())
    rng = np.random.default_rng(0)
    f1 = GridFunction(g, rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64)))
    f2 = GridFunction(g, rng.standard_normal((64, 64)))
    lin = symplectic_fourier(GridFunction(g, 2 * f1.samples - 3j * f2.samples))
    assert np.allclose(lin.samples,
                       2 * symplectic_fourier(f1).samples - 3j * symplectic_fourier(f2).samples)
    rt = symplectic_fourier(symplectic_fourier(f1), inverse=True)
    assert np.max(np.abs(rt.samples - f1.samples)) < 1e-10


def test_sft_id2_gives_momentum_flip():
    g = PhaseGrid(64, 8.0, 8.0, ModelConstants())
    f = GridFunction.from_callable(
        g, lambda Q, Pm: np.exp(-((Q - 1) ** 2 + (Pm + 0.5) ** 2) / 2))
    syn = plane_wave_synthesis(symplectic_fourier(f))
    assert np.max(np.abs(syn.samples - f.flipped_p().samples)) < 1e-10


# -- Wigner transform -----------------------------------------------------------

def test_wigner_identity_kernel_grid_artifact(grid):
    # The delta/dx identity kernel is not band-limited: the integer-aligned
    # xi-lattice weights the diagonal fully and returns the constant 2
    # (continuum value 1); smooth kernels are unaffected.
    W = wigner_transform(KernelOperator.identity(grid), check_boundary=False)
    assert np.allclose(W.samples, 2.0)


def test_wigner_mehler_matches_closed_form():
    for bho in (0.5, 1.0, 2.0):
        c = ModelConstants(beta=bho)
        L = 12.0 / np.sqrt(max(np.tanh(bho / 2), 1e-8))
        g = PhaseGrid.nyquist(256, L, c)
        W = wigner_transform(mehler_gibbs_kernel(g))
        closed = oscillator_gibbs_wigner(c, grid=g)
        err = np.max(np.abs(W.samples - closed["wigner"].samples)) \
            / np.max(np.abs(closed["wigner"].samples))
        # N = 256 keeps the unit test fast; the xi-sum discretization tail
        # dominates at small beta (the acceptance suite runs N = 512 at 1e-15)
        assert err < 1e-6
        assert not W.boundary_warning


def test_wigner_ground_state_peak(grid):
    Pk = KernelOperator.projector(grid, oscillator_eigenstate(0, grid))
    W = wigner_transform(Pk)
    i0 = grid.N // 2
    assert W.samples[i0, i0].real == pytest.approx(2.0, abs=1e-10)
    assert W.phase_space_trace().real == pytest.approx(1.0, abs=1e-10)
    assert float(np.max(np.abs(W.samples))) <= 2.0 + 1e-10


def test_wigner_realness_for_hermitian(grid, ho_basis):
    K = smooth_kernel(grid, ho_basis, 1)
    W = wigner_transform(K)
    assert W.is_real(1e-12)


def test_wigner_conjugation(grid, ho_basis):
    K = smooth_kernel(grid, ho_basis, 2, herm=False)
    W = wigner_transform(K)
    Wd = wigner_transform(K.adjoint())
    assert np.max(np.abs(Wd.samples - W.samples.conj())) < 1e-12


def test_wigner_isometry(grid, ho_basis):
    for seed in range(5):
        K = smooth_kernel(grid, ho_basis, 10 + seed)
        W = wigner_transform(K)
        assert abs(W.hs_norm_sq() - K.hs_norm_sq()) <= 1e-10 * K.hs_norm_sq()


def test_wigner_boundary_warning():
    g = PhaseGrid.nyquist(64, 2.0, ModelConstants(beta=0.05))  # box too small
    W = wigner_transform(mehler_gibbs_kernel(g))
    assert W.boundary_warning


# -- Weyl map ----------------------------------------------------------------------

def test_weyl_constant_one_is_identity():
    # the delta-kernel identities live on the commensurate grid, where the
    # momentum sum covers the full lattice period
    g = PhaseGrid.commensurate(64, 6.0, ModelConstants())
    f = GridFunction.from_callable(g, lambda Q, Pm: np.ones_like(Q))
    K = weyl_map(f)
    assert np.max(np.abs(K.kernel - np.eye(g.N) / g.dx)) < 1e-10 / g.dx


def test_weyl_q_acts_as_multiplication():
    g = PhaseGrid.commensurate(64, 6.0, ModelConstants())
    f = GridFunction.from_callable(g, lambda Q, Pm: Q)
    K = weyl_map(f)
    psi = oscillator_eigenstate(3, g) + 0.4 * oscillator_eigenstate(1, g)
    lhs = K.apply(psi)
    rhs = g.x * psi
    assert np.max(np.abs(lhs - rhs)) < 1e-8 * np.max(np.abs(rhs))


def test_weyl_left_inverse_of_wigner(grid, ho_basis):
    K = smooth_kernel(grid, ho_basis, 3)
    K2 = weyl_map(wigner_transform(K))
    assert np.max(np.abs(K2.kernel - K.kernel)) < 1e-8 * np.max(np.abs(K.kernel))


def test_wigner_left_inverse_of_weyl(grid):
    f = GridFunction.from_callable(
        grid, lambda Q, Pm: (Q ** 2 - Pm) * np.exp(-(Q ** 2 + Pm ** 2) / 4))
    f2 = wigner_transform(weyl_map(f), check_boundary=False)
    assert np.max(np.abs(f2.samples - f.samples)) < 1e-8 * np.max(np.abs(f.samples))


# -- phase-point operators ------------------------------------------------------------

def test_frame_unit_trace():
    g = PhaseGrid.commensurate(32, 5.0, ModelConstants())
    frame = phase_point_frame(g)
    for (i, j) in [(16, 16), (5, 20), (28, 3)]:
        assert frame.operator(i, j).trace() == pytest.approx(1.0)
        assert frame.operator(i, j).is_hermitian()


def test_frame_trace_orthogonality_commensurate():
    # Tr(A(z) A(z')) = 2 pi hbar delta_zz' / (dq dp) up to O(1/N) boundary
    # truncation of the xi lattice
    g = PhaseGrid.commensurate(64, 6.0, ModelConstants())
    frame = phase_point_frame(g)
    w = g.dq * g.dp / (2 * np.pi * g.constants.hbar)
    A = frame.operator(32, 32)
    same = (A.compose(A)).trace().real * w
    assert abs(same - 1.0) <= 2.0 / g.N
    for (i, j) in [(32, 35), (30, 32), (40, 50)]:
        other = frame.operator(i, j)
        assert abs((A.compose(other)).trace() * w) <= 2.0 / g.N


def test_frame_identity_resolution_commensurate():
    g = PhaseGrid.commensurate(32, 5.0, ModelConstants())
    frame = phase_point_frame(g)
    w = g.dq * g.dp / (2 * np.pi * g.constants.hbar)
    S = sum(frame.operator(i, j).kernel for i in range(32) for j in range(32)) * w
    assert np.max(np.abs(S - np.eye(32) / g.dx)) < 1e-12 / g.dx


def test_frame_coefficients_equal_wigner(grid, ho_basis):
    frame = phase_point_frame(grid)
    K = smooth_kernel(grid, ho_basis, 4)
    Wc = frame.coefficients(K)
    Wt = wigner_transform(K)
    assert np.max(np.abs(Wc.samples - Wt.samples)) < 1e-9


def test_frame_expand_reconstructs_even_checkerboard(grid, ho_basis):
    frame = phase_point_frame(grid)
    K = smooth_kernel(grid, ho_basis, 5)
    Krec = frame.expand(wigner_transform(K))
    m = np.arange(grid.N)
    even = ((m[:, None] + m[None, :]) % 2) == 0
    scale = np.max(np.abs(K.kernel))
    assert np.max(np.abs((Krec.kernel - K.kernel)[even])) < 1e-10 * scale
    assert np.max(np.abs(Krec.kernel[~even])) == 0.0


def test_frame_rejects_odd_N():
    with pytest.raises(GridError):
        PhaseGrid(N=31, L_q=1.0, L_p=1.0)


# -- oscillator Gibbs oracle ------------------------------------------------------------

def test_gibbs_center_value():
    out = oscillator_gibbs_wigner(ModelConstants(beta=2.0))
    assert out["center_value"] == pytest.approx(1.0 / np.cosh(1.0))
    assert out["center_value"] == pytest.approx(0.6480542737, abs=1e-9)


def test_gibbs_partition_function():
    out = oscillator_gibbs_wigner(ModelConstants(beta=2.0))
    assert out["trace_exact"] == pytest.approx(1.0 / (2 * np.sinh(1.0)))
    assert out["trace_exact"] == pytest.approx(0.4254590641, abs=1e-9)
    assert out["trace_quadrature"] == pytest.approx(out["trace_exact"], rel=1e-10)


def test_gibbs_high_temperature_limit():
    c = ModelConstants(beta=1e-8)
    out = oscillator_gibbs_wigner(c, grid=PhaseGrid.nyquist(64, 3.0, c))
    W = out["wigner"].samples
    assert np.max(np.abs(W - 1.0)) < 1e-5  # identity operator limit


# -- classical KMS ---------------------------------------------------------------------

def test_kms_harmonic_qp():
    q, p = P.q(), P.p()
    H = 0.5 * (q * q + p * p)
    g = PhaseGrid(256, 8.0, 8.0, ModelConstants())
    rep = classical_kms_check(H, q, p, beta=1.0, grid=g)
    assert rep["lhs"] == pytest.approx(1.0, abs=1e-10)
    assert rep["rhs"] == pytest.approx(1.0, abs=1e-10)
    assert rep["residual"] < 1e-10
    assert not rep["accuracy_warning"]


def test_kms_constant_g_trivial():
    q, p = P.q(), P.p()
    H = 0.5 * (q * q + p * p)
    g = PhaseGrid(128, 8.0, 8.0, ModelConstants())
    rep = classical_kms_check(H, q, P.one(1), beta=1.0, grid=g)
    assert abs(rep["lhs"]) < 1e-12 and abs(rep["rhs"]) < 1e-12


def test_kms_quartic_oscillator():
    q, p = P.q(), P.p()
    H = 0.5 * p * p + 0.25 * q * q * q * q
    g = PhaseGrid(512, 8.0, 8.0, ModelConstants())
    rep = classical_kms_check(H, q * q, p, beta=1.0, grid=g)
    assert rep["residual"] < 1e-6


def test_kms_nontrivial_two_sided():
    q, p = P.q(), P.p()
    H = 0.5 * (q * q + p * p)
    g = PhaseGrid(256, 8.0, 8.0, ModelConstants())
    rep = classical_kms_check(H, q * q, q * p, beta=0.7, grid=g)
    # both sides equal 2 <q^2> = 2 / beta
    assert rep["lhs"] == pytest.approx(2.0 / 0.7, rel=1e-8)
    assert rep["residual"] < 1e-8


def test_kms_warns_without_decay():
    q, p = P.q(), P.p()
    H = 0.5 * (q * q + p * p)
    g = PhaseGrid(64, 1.0, 1.0, ModelConstants())  # Gibbs weight not decayed
    rep = classical_kms_check(H, q, p, beta=0.1, grid=g)
    assert rep["accuracy_warning"]


def test_grid_function_binary_round_trip(tmp_path):
    g = PhaseGrid(32, 4.0, 5.0, ModelConstants(hbar=0.5))
    rng = np.random.default_rng(1)
    f = GridFunction(g, rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32)))
    path = str(tmp_path / "f.npz")
    f.to_binary(path)
    f2 = GridFunction.from_binary(path)
    assert f2.grid.N == 32
    assert f2.grid.L_q == pytest.approx(4.0)
    assert f2.grid.constants.hbar == pytest.approx(0.5)
    assert np.allclose(f2.samples, f.samples)


def test_kernel_csv_rows():
    g = PhaseGrid(8, 2.0, 2.0, ModelConstants())
    K = KernelOperator.identity(g)
    rows = list(K.to_csv_rows())
    assert len(rows) == 64
    x0, x1, re, im = rows[0]
    assert x0 == pytest.approx(g.x[0]) and x1 == pytest.approx(g.x[0])
    assert re == pytest.approx(1.0 / g.dx) and im == 0.0
