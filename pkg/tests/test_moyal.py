"""Moyal products and brackets, both backends, deformations, circle model."""

import numpy as np
import pytest

from biham.constants import ModelConstants
from biham.moyal import (
    CircleFunction,
    circle_deformed_bracket,
    classical_deformed_bracket,
    moyal_bracket,
    moyal_bracket_grid,
    moyal_bracket_poly,
    moyal_product,
    moyal_product_grid,
    moyal_product_poly,
)
from biham.polynomials import PhasePolynomial as P, poisson_bracket_poly
from biham.wigner import (
    GridFunction,
    KernelOperator,
    PhaseGrid,
    oscillator_eigenstate,
    wigner_transform,
    weyl_map,
)


def rand_poly(n_dof, deg, seed, n_terms=5):
    rng = np.random.default_rng(seed)
    terms = {}
    for _ in range(n_terms):
        exps = tuple(int(e) for e in rng.integers(0, deg + 1, size=2 * n_dof))
        c = int(rng.integers(-3, 4))
        if c:
            terms[(exps, 0)] = terms.get((exps, 0), 0) + c
    return P(n_dof, terms)


def series_oracle(f, g, nmax=12):
    """Independent double-sum form of the Moyal series (1 dof):

    f*g = sum_{n,m} (i hbar/2)^{n+m} (-1)^n/(n! m!) f_{q^m p^n} g_{q^n p^m}."""
    from math import factorial
    out = P.zero(1)
    for n in range(nmax):
        for m in range(nmax):
            fa = f
            for _ in range(m):
                fa = fa.diff_q()
            for _ in range(n):
                fa = fa.diff_p()
            if not fa.terms:
                continue
            ga = g
            for _ in range(n):
                ga = ga.diff_q()
            for _ in range(m):
                ga = ga.diff_p()
            if not ga.terms:
                continue
            coeff = (0.5j) ** (n + m) * (-1) ** n / (factorial(n) * factorial(m))
            out = out + (fa * ga * coeff).mul_hbar(n + m)
    return out


# -- polynomial backend --------------------------------------------------------

def test_qp_anchor():
    q, p = P.q(), P.p()
    qp = moyal_product_poly(q, p)
    pq = moyal_product_poly(p, q)
    assert qp == q * p + 0.5j * P.hbar(1)
    assert pq == q * p - 0.5j * P.hbar(1)
    assert (qp - pq) == 1j * P.hbar(1)


def test_unit_is_neutral():
    g = rand_poly(1, 3, 0)
    one = P.one(1)
    assert moyal_product_poly(one, g) == g
    assert moyal_product_poly(g, one) == g


def test_q_star_g_shift_form():
    # q*g = (q + i hbar/2 d_p) g and g*q = (q - i hbar/2 d_p) g
    g = rand_poly(1, 3, 1)
    q = P.q()
    assert moyal_product_poly(q, g) == q * g + (0.5j * g.diff_p()).mul_hbar(1)
    assert moyal_product_poly(g, q) == q * g - (0.5j * g.diff_p()).mul_hbar(1)


def test_associativity_coefficient_exact():
    for seed in range(4):
        f = rand_poly(1, 4, 3 * seed)
        g = rand_poly(1, 4, 3 * seed + 1)
        h = rand_poly(1, 4, 3 * seed + 2)
        lhs = moyal_product_poly(moyal_product_poly(f, g), h)
        rhs = moyal_product_poly(f, moyal_product_poly(g, h))
        # exact up to float roundoff in the 1/k! factors of the deep series
        scale = max(lhs.coefficient_norm(), 1.0)
        assert (lhs - rhs).coefficient_norm() <= 1e-12 * scale


def test_multi_dof_product():
    q1, p2 = P.q(2, 0), P.p(2, 1)
    # different dof commute exactly
    assert moyal_product_poly(q1, p2) == q1 * p2
    q2 = P.q(2, 1)
    assert moyal_bracket_poly(P.p(2, 1), q2) == -1.0 * P.one(2)


def test_hbar_parity():
    f = rand_poly(1, 4, 20)
    g = rand_poly(1, 4, 21)
    fg = moyal_product_poly(f, g)
    gf = moyal_product_poly(g, f)
    kmax = max(fg.max_hbar_power(), gf.max_hbar_power())
    for k in range(kmax + 1):
        a = fg.hbar_coefficient(k)
        b = gf.hbar_coefficient(k)
        if k % 2 == 0:
            assert (a - b).terms == {}
        else:
            assert (a + b).terms == {}


def test_series_oracle_agreement():
    for seed in range(6):
        f = rand_poly(1, 3, 100 + seed)
        g = rand_poly(1, 3, 200 + seed)
        assert (moyal_product_poly(f, g) - series_oracle(f, g)).terms == {}


def test_bracket_anchors():
    q, p = P.q(), P.p()
    assert moyal_bracket_poly(q, p) == P.one(1)
    g = rand_poly(1, 3, 30)
    assert moyal_bracket_poly(q, g) == g.diff_p()
    assert moyal_bracket_poly(p, g) == -1.0 * g.diff_q()


def test_bracket_quadratic_equals_poisson():
    q, p = P.q(), P.p()
    f = q * q + q * p  # at most quadratic
    g = rand_poly(1, 4, 31)
    assert moyal_bracket_poly(f, g) == poisson_bracket_poly(f, g)


def test_bracket_cubic_hbar_correction():
    q, p = P.q(), P.p()
    q3 = q * q * q
    p3 = p * p * p
    mb = moyal_bracket_poly(q3, p3)
    assert mb.hbar_coefficient(0) == poisson_bracket_poly(q3, p3)
    # the hbar^2 term from the independent series oracle
    diff = series_oracle(q3, p3) - series_oracle(p3, q3)
    oracle = diff.div_hbar() * (-1j)
    assert (mb - oracle).terms == {}
    assert mb.hbar_coefficient(2).terms != {}  # genuine quantum correction


def test_bracket_jacobi_and_derivation():
    f = rand_poly(1, 3, 40)
    g = rand_poly(1, 3, 41)
    h = rand_poly(1, 3, 42)
    jac = moyal_bracket_poly(f, moyal_bracket_poly(g, h)) \
        + moyal_bracket_poly(g, moyal_bracket_poly(h, f)) \
        + moyal_bracket_poly(h, moyal_bracket_poly(f, g))
    assert jac.terms == {}
    lhs = moyal_bracket_poly(f, moyal_product_poly(g, h))
    rhs = moyal_product_poly(moyal_bracket_poly(f, g), h) \
        + moyal_product_poly(g, moyal_bracket_poly(f, h))
    assert (lhs - rhs).terms == {}


# -- deformations ---------------------------------------------------------------

def test_deformed_bracket_k_one_is_poisson():
    f = rand_poly(1, 3, 50)
    g = rand_poly(1, 3, 51)
    assert classical_deformed_bracket(f, g, P.one(1)) == poisson_bracket_poly(f, g)


def test_deformed_bracket_jacobi_exact():
    k = P.one(1) + rand_poly(1, 2, 52)
    for seed in range(3):
        f = rand_poly(1, 3, 60 + seed)
        g = rand_poly(1, 3, 70 + seed)
        h = rand_poly(1, 3, 80 + seed)
        jac = classical_deformed_bracket(f, classical_deformed_bracket(g, h, k), k) \
            + classical_deformed_bracket(g, classical_deformed_bracket(h, f, k), k) \
            + classical_deformed_bracket(h, classical_deformed_bracket(f, g, k), k)
        assert jac.terms == {}


def test_deformed_bracket_not_a_derivation():
    # {f, .}_k fails Leibniz (it is not even zero on constants)
    q, p = P.q(), P.p()
    k = P.one(1) + p
    lhs = classical_deformed_bracket(q, P.one(1), k)  # = -{k, q} = 1
    assert lhs == P.one(1)


def test_deformed_moyal_hbar_limit():
    k = P.one(1) + rand_poly(1, 2, 90)
    f = rand_poly(1, 3, 91)
    g = rand_poly(1, 3, 92)
    mb = moyal_bracket_poly(f, g, k)
    cl = classical_deformed_bracket(f, g, k)
    assert (mb.hbar_coefficient(0) - cl).coefficient_norm() < 1e-12
    one = P.one(1)
    assert (moyal_bracket_poly(f, g, one) - moyal_bracket_poly(f, g)).terms == {}


def test_deformed_moyal_jacobi():
    k = P.one(1) + 0.5 * P.q()
    f, g, h = P.q() * P.q(), P.q() * P.p(), P.p() * P.p()
    jac = moyal_bracket_poly(f, moyal_bracket_poly(g, h, k), k) \
        + moyal_bracket_poly(g, moyal_bracket_poly(h, f, k), k) \
        + moyal_bracket_poly(h, moyal_bracket_poly(f, g, k), k)
    assert jac.coefficient_norm() < 1e-12


# -- circle model -----------------------------------------------------------------

def test_circle_conformal_algebra_exact():
    for n in range(-5, 6):
        for m in range(-5, 6):
            out = circle_deformed_bracket(CircleFunction.mode(n), CircleFunction.mode(m))
            expect = CircleFunction({n + m: complex(n - m)})
            assert out == expect


def test_circle_bracket_bilinear():
    f = CircleFunction({1: 2.0, -2: 1j})
    g = CircleFunction({0: 1.0, 3: -0.5})
    h = CircleFunction({2: 0.25})
    lhs = circle_deformed_bracket(f + h, g)
    rhs = circle_deformed_bracket(f, g) + circle_deformed_bracket(h, g)
    assert lhs == rhs


# -- grid backend ------------------------------------------------------------------

@pytest.fixture(scope="module")
def mgrid():
    return PhaseGrid.nyquist(128, 10.0, ModelConstants())


def test_grid_star_projector_idempotent(mgrid):
    psi = oscillator_eigenstate(0, mgrid)
    W = wigner_transform(KernelOperator.projector(mgrid, psi))
    W2 = moyal_product_grid(W, W)
    assert np.max(np.abs(W2.samples - W.samples)) < 1e-12
    assert W.phase_space_trace().real == pytest.approx(1.0, abs=1e-10)


def test_grid_star_cross_backend_windowed(mgrid):
    # windowed polynomials against the exact operator algebra: q^2 G0 and
    # p^2 G0 are Wigner functions of S_Q^2 P0 and S_P^2 P0 with
    # S_Q(O) = (QO + OQ)/2 (band-limited, so the grid backend is exact)
    hbar = mgrid.constants.hbar
    Q, Pm = mgrid.meshgrid()
    G0 = 2.0 * np.exp(-(Q ** 2 + Pm ** 2) / hbar)
    f = GridFunction(mgrid, Q ** 2 * G0)
    g = GridFunction(mgrid, Pm ** 2 * G0)
    M = 24
    basis = np.stack([oscillator_eigenstate(n, mgrid) for n in range(M)], axis=1)
    ad = np.zeros((M, M))
    for k in range(1, M):
        ad[k, k - 1] = np.sqrt(k)
    a = ad.T
    Qop = np.sqrt(hbar / 2) * (a + ad)
    Pop = 1j * np.sqrt(hbar / 2) * (ad - a)
    P0 = np.zeros((M, M), dtype=complex)
    P0[0, 0] = 1.0
    SQ = lambda O: 0.5 * (Qop @ O + O @ Qop)
    SP = lambda O: 0.5 * (Pop @ O + O @ Pop)
    Af, Ag = SQ(SQ(P0)), SP(SP(P0))
    # sanity: the inputs match the operator-side Wigner functions
    Wf = wigner_transform(KernelOperator(mgrid, basis @ Af @ basis.conj().T))
    assert np.max(np.abs(Wf.samples - f.samples)) < 1e-10
    prod = moyal_product_grid(f, g)
    expected = wigner_transform(KernelOperator(mgrid, basis @ (Af @ Ag) @ basis.conj().T))
    scale = np.max(np.abs(expected.samples))
    assert np.max(np.abs(prod.samples - expected.samples)) < 1e-6 * scale


def test_grid_bracket_matches_heisenberg(mgrid):
    psi = oscillator_eigenstate(1, mgrid)
    Pk = KernelOperator.projector(mgrid, psi)
    W = wigner_transform(Pk)
    fH = GridFunction.from_polynomial(mgrid, 0.5 * (P.q() * P.q() + P.p() * P.p()))
    lhs = moyal_bracket_grid(W, fH)
    KH = weyl_map(fH)
    comm = (Pk.compose(KH).kernel - KH.compose(Pk).kernel) / (1j * mgrid.constants.hbar)
    rhs = wigner_transform(KernelOperator(mgrid, comm), check_boundary=False)
    assert np.max(np.abs(lhs.samples - rhs.samples)) < 1e-7


def test_grid_deformation_requires_positive_k(mgrid):
    Q, Pm = mgrid.meshgrid()
    f = GridFunction(mgrid, np.exp(-(Q ** 2 + Pm ** 2)))
    with pytest.raises(ValueError):
        moyal_product_grid(f, f, k=GridFunction(mgrid, Q))  # changes sign


def test_dispatch_on_type(mgrid):
    q, p = P.q(), P.p()
    assert moyal_product(q, p) == moyal_product_poly(q, p)
    assert moyal_bracket(q, p) == P.one(1)
    Q, Pm = mgrid.meshgrid()
    f = GridFunction(mgrid, np.exp(-(Q ** 2 + Pm ** 2)))
    out = moyal_product(f, f)
    assert isinstance(out, GridFunction)
