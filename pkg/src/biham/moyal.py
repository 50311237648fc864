"""Moyal products and brackets.

Polynomial backend: the star product is the terminating bidifferential
series

    f * g = sum_k (i hbar / 2)^k / k!  P^k(f, g),
    P = sum_i (d_q_i (x) d_p_i - d_p_i (x) d_q_i),

kept exact by carrying hbar as a formal power. Grid backend: operators are
composed through the Weyl map, f * g = Winv(W(f) . W(g)), which is O(N^3)
and consistent with the integral form by construction.

Deformations: f *_k g = f * k * g for positive k, with bracket
{f, g}_{M,k} = (f *_k g - g *_k f)/(i hbar); its hbar -> 0 limit is the
Jacobi (conformal) bracket {f, g}_k = k {f, g} + f {k, g} - g {k, f}.
The circle model (Fourier modes f_n = e^{i n phi}, X_k = i d_phi) realizes
the centerless conformal algebra {f_n, f_m}_k = (n - m) f_{n+m}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polynomials import DimensionMismatch, PhasePolynomial, poisson_bracket_poly
from .wigner import GridFunction, wigner_transform, weyl_map

__all__ = [
    "moyal_product_poly",
    "moyal_bracket_poly",
    "moyal_product_grid",
    "moyal_bracket_grid",
    "moyal_product",
    "moyal_bracket",
    "classical_deformed_bracket",
    "CircleFunction",
    "circle_deformed_bracket",
]


# ---------------------------------------------------------------------------
# Polynomial backend
# ---------------------------------------------------------------------------

def _apply_P(pairs: dict) -> dict:
    """One application of the Poisson bidifferential operator to a 'tensor'
    sum of (f-monomial, g-monomial) pairs with coefficients."""
    out: dict = {}
    for (fm, gm), c in pairs.items():
        f = fm
        g = gm
        n = f.n_dof
        for i in range(n):
            for fa, ga, sign in ((f.diff_q(i), g.diff_p(i), 1.0),
                                 (f.diff_p(i), g.diff_q(i), -1.0)):
                if not fa.terms or not ga.terms:
                    continue
                key = (fa, ga)
                out[key] = out.get(key, 0.0) + sign * c
                if out[key] == 0:
                    del out[key]
    return out


def moyal_product_poly(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """Exact terminating Moyal series on polynomials; anchors q*p = qp + i hbar/2."""
    if f.n_dof != g.n_dof:
        raise DimensionMismatch(f"n_dof mismatch: {f.n_dof} vs {g.n_dof}")
    n_dof = f.n_dof
    result = PhasePolynomial.zero(n_dof)
    pairs: dict = {(f, g): 1.0}
    k = 0
    coeff = 1.0 + 0j
    while pairs:
        # coeff = (i/2)^k / k!, the hbar^k power carried formally
        for (fm, gm), c in pairs.items():
            term = (fm * gm) * (coeff * c)
            result = result + term.mul_hbar(k)
        pairs = _apply_P(pairs)
        k += 1
        coeff *= 0.5j / k
    return result


def moyal_bracket_poly(f: PhasePolynomial, g: PhasePolynomial,
                       k: PhasePolynomial | None = None) -> PhasePolynomial:
    """{f, g}_M = (f*g - g*f)/(i hbar); with deformation k: (f*k*g - g*k*f)/(i hbar)."""
    if k is None:
        diff = moyal_product_poly(f, g) - moyal_product_poly(g, f)
    else:
        diff = moyal_product_poly(moyal_product_poly(f, k), g) \
            - moyal_product_poly(moyal_product_poly(g, k), f)
    # every surviving term carries hbar^{>=1}: the hbar^0 parts cancel exactly
    return diff.div_hbar() * (-1j)


def moyal_product_grid(f: GridFunction, g: GridFunction,
                       k: GridFunction | None = None) -> GridFunction:
    """f * g = Winv(W(f) W(g)) on the grid; with deformation, f * k * g."""
    Of = weyl_map(f)
    Og = weyl_map(g)
    if k is not None:
        if np.min(k.samples.real) <= 0 or not k.is_real(1e-8):
            raise ValueError("deformation factor must be strictly positive on the grid")
        Ok = weyl_map(k)
        comp = Of.compose(Ok).compose(Og)
    else:
        comp = Of.compose(Og)
    return wigner_transform(comp)


def moyal_bracket_grid(f: GridFunction, g: GridFunction,
                       k: GridFunction | None = None) -> GridFunction:
    fg = moyal_product_grid(f, g, k)
    gf = moyal_product_grid(g, f, k)
    hbar = f.grid.constants.hbar
    return GridFunction(f.grid, (fg.samples - gf.samples) / (1j * hbar))


def moyal_product(f, g, k=None):
    """Backend dispatch on the argument type (PhasePolynomial or GridFunction)."""
    if isinstance(f, PhasePolynomial):
        if k is None:
            return moyal_product_poly(f, g)
        if np.max(np.abs([c.imag for c in k.terms.values()] or [0])) > 0:
            raise ValueError("deformation factor must be real")
        return moyal_product_poly(moyal_product_poly(f, k), g)
    return moyal_product_grid(f, g, k)


def moyal_bracket(f, g, k=None):
    if isinstance(f, PhasePolynomial):
        return moyal_bracket_poly(f, g, k)
    return moyal_bracket_grid(f, g, k)


# ---------------------------------------------------------------------------
# Jacobi (conformal) bracket
# ---------------------------------------------------------------------------

def classical_deformed_bracket(f: PhasePolynomial, g: PhasePolynomial,
                               k: PhasePolynomial) -> PhasePolynomial:
    """{f, g}_k = k {f, g} + f {k, g} - g {k, f}: satisfies Jacobi but is not
    a derivation; the hbar -> 0 limit of the deformed Moyal bracket."""
    if not (f.n_dof == g.n_dof == k.n_dof):
        raise DimensionMismatch("mismatched n_dof")
    return k * poisson_bracket_poly(f, g) \
        + f * poisson_bracket_poly(k, g) \
        - g * poisson_bracket_poly(k, f)


# ---------------------------------------------------------------------------
# The circle model (Fourier modes; degenerate Lambda, pure X_k part)
# ---------------------------------------------------------------------------

@dataclass
class CircleFunction:
    """Finite Fourier series sum_n c_n e^{i n phi} on the circle."""

    modes: dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        self.modes = {int(n): complex(c) for n, c in self.modes.items() if c != 0}

    @classmethod
    def mode(cls, n: int, coeff: complex = 1.0) -> "CircleFunction":
        return cls({n: coeff})

    def __add__(self, other: "CircleFunction") -> "CircleFunction":
        out = dict(self.modes)
        for n, c in other.modes.items():
            out[n] = out.get(n, 0) + c
            if out[n] == 0:
                del out[n]
        return CircleFunction(out)

    def __mul__(self, other):
        if isinstance(other, CircleFunction):
            out: dict[int, complex] = {}
            for n, a in self.modes.items():
                for m, b in other.modes.items():
                    out[n + m] = out.get(n + m, 0) + a * b
            return CircleFunction(out)
        return CircleFunction({n: other * c for n, c in self.modes.items()})

    __rmul__ = __mul__

    def __sub__(self, other: "CircleFunction") -> "CircleFunction":
        return self + (-1.0) * other

    def __eq__(self, other):
        return isinstance(other, CircleFunction) and self.modes == other.modes

    def derivative(self) -> "CircleFunction":
        """d/dphi, i.e. e^{i n phi} -> i n e^{i n phi}."""
        return CircleFunction({n: 1j * n * c for n, c in self.modes.items()})


def circle_deformed_bracket(f: CircleFunction, g: CircleFunction) -> CircleFunction:
    """{f, g}_k = f L_X g - g L_X f with X_k = i d_phi (dimension one: the
    bivector part vanishes identically). On modes: {f_n, f_m}_k = (n-m) f_{n+m},
    the centerless conformal (Virasoro) algebra."""
    Lg = 1j * g.derivative()
    Lf = 1j * f.derivative()
    return f * Lg - g * Lf
