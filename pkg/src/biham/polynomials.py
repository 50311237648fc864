"""Sparse polynomials in phase-space variables (q_1..q_n, p_1..p_n) with a
formal nonnegative power of hbar attached to every term.

Keeping hbar formal makes the Moyal series exact on polynomials: the star
product terminates and its coefficients are computed once, with numbers
substituted only at evaluation time.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np

__all__ = ["DimensionMismatch", "PhasePolynomial", "poisson_bracket_poly"]

# coefficients below this magnitude (relative to the largest) are dropped
_PRUNE = 0.0


class DimensionMismatch(ValueError):
    """Raised when two polynomials over different numbers of dof are combined."""


def _check_same_dof(f: "PhasePolynomial", g: "PhasePolynomial") -> None:
    if f.n_dof != g.n_dof:
        raise DimensionMismatch(f"n_dof mismatch: {f.n_dof} vs {g.n_dof}")


class PhasePolynomial:
    """Polynomial in 2*n_dof variables; term key = (exponent tuple, hbar power).

    Exponents are ordered (q_1..q_n, p_1..p_n). Zero-coefficient terms are
    never stored. Instances are immutable in practice: every operation
    returns a fresh polynomial.
    """

    __slots__ = ("n_dof", "terms")

    def __init__(self, n_dof: int, terms: Mapping[tuple[tuple[int, ...], int], complex] | None = None):
        if n_dof < 1:
            raise ValueError("n_dof must be a positive integer")
        self.n_dof = int(n_dof)
        clean: dict[tuple[tuple[int, ...], int], complex] = {}
        if terms:
            for (exps, k), c in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != 2 * self.n_dof:
                    raise DimensionMismatch(
                        f"exponent tuple of length {len(exps)} for n_dof={self.n_dof}")
                if any(e < 0 for e in exps) or k < 0:
                    raise ValueError("exponents and hbar powers must be nonnegative")
                c = complex(c)
                if c != 0:
                    key = (exps, int(k))
                    clean[key] = clean.get(key, 0) + c
                    if clean[key] == 0:
                        del clean[key]
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n_dof: int) -> "PhasePolynomial":
        return cls(n_dof)

    @classmethod
    def constant(cls, n_dof: int, value: complex) -> "PhasePolynomial":
        return cls(n_dof, {(tuple([0] * 2 * n_dof), 0): value})

    @classmethod
    def one(cls, n_dof: int) -> "PhasePolynomial":
        return cls.constant(n_dof, 1.0)

    @classmethod
    def q(cls, n_dof: int = 1, i: int = 0) -> "PhasePolynomial":
        e = [0] * (2 * n_dof)
        e[i] = 1
        return cls(n_dof, {(tuple(e), 0): 1.0})

    @classmethod
    def p(cls, n_dof: int = 1, i: int = 0) -> "PhasePolynomial":
        e = [0] * (2 * n_dof)
        e[n_dof + i] = 1
        return cls(n_dof, {(tuple(e), 0): 1.0})

    @classmethod
    def hbar(cls, n_dof: int = 1, power: int = 1) -> "PhasePolynomial":
        return cls(n_dof, {(tuple([0] * 2 * n_dof), power): 1.0})

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, PhasePolynomial):
            other = PhasePolynomial.constant(self.n_dof, other)
        _check_same_dof(self, other)
        acc = dict(self.terms)
        for key, c in other.terms.items():
            acc[key] = acc.get(key, 0) + c
            if acc[key] == 0:
                del acc[key]
        return PhasePolynomial(self.n_dof, acc)

    __radd__ = __add__

    def __neg__(self):
        return PhasePolynomial(self.n_dof, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, PhasePolynomial):
            other = PhasePolynomial.constant(self.n_dof, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PhasePolynomial):
            c = complex(other)
            return PhasePolynomial(self.n_dof,
                                   {k: c * v for k, v in self.terms.items()})
        _check_same_dof(self, other)
        acc: dict[tuple[tuple[int, ...], int], complex] = {}
        for (e1, k1), c1 in self.terms.items():
            for (e2, k2), c2 in other.terms.items():
                key = (tuple(a + b for a, b in zip(e1, e2)), k1 + k2)
                acc[key] = acc.get(key, 0) + c1 * c2
                if acc[key] == 0:
                    del acc[key]
        return PhasePolynomial(self.n_dof, acc)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PhasePolynomial):
            return NotImplemented
        return self.n_dof == other.n_dof and self.terms == other.terms

    def __hash__(self):
        return hash((self.n_dof, frozenset(self.terms.items())))

    # -- calculus -----------------------------------------------------------

    def diff(self, var: int) -> "PhasePolynomial":
        """Partial derivative; var indexes (q_1..q_n, p_1..p_n)."""
        acc: dict[tuple[tuple[int, ...], int], complex] = {}
        for (exps, k), c in self.terms.items():
            e = exps[var]
            if e == 0:
                continue
            new = list(exps)
            new[var] = e - 1
            key = (tuple(new), k)
            acc[key] = acc.get(key, 0) + c * e
        return PhasePolynomial(self.n_dof, acc)

    def diff_q(self, i: int = 0) -> "PhasePolynomial":
        return self.diff(i)

    def diff_p(self, i: int = 0) -> "PhasePolynomial":
        return self.diff(self.n_dof + i)

    def mul_hbar(self, power: int = 1) -> "PhasePolynomial":
        return PhasePolynomial(self.n_dof,
                               {(e, k + power): c for (e, k), c in self.terms.items()})

    def div_hbar(self) -> "PhasePolynomial":
        """Divide by hbar; every term must carry hbar^k with k >= 1."""
        acc = {}
        for (e, k), c in self.terms.items():
            if k == 0:
                raise ValueError("term with hbar^0 present, cannot divide by hbar")
            acc[(e, k - 1)] = c
        return PhasePolynomial(self.n_dof, acc)

    def hbar_coefficient(self, k: int) -> "PhasePolynomial":
        """The polynomial multiplying hbar^k (hbar power reset to zero)."""
        return PhasePolynomial(self.n_dof,
                               {(e, 0): c for (e, kk), c in self.terms.items() if kk == k})

    def max_hbar_power(self) -> int:
        return max((k for (_, k) in self.terms), default=0)

    def degree(self) -> int:
        return max((sum(e) for (e, _) in self.terms), default=0)

    def evaluate(self, point: Iterable[float], hbar: float = 1.0) -> complex:
        """Evaluate at a phase-space point (q_1..q_n, p_1..p_n) with a numeric hbar."""
        x = np.asarray(list(point), dtype=complex)
        if x.size != 2 * self.n_dof:
            raise DimensionMismatch(f"point of length {x.size} for n_dof={self.n_dof}")
        total = 0j
        for (exps, k), c in self.terms.items():
            val = c * (hbar ** k)
            for xi, e in zip(x, exps):
                if e:
                    val *= xi ** e
            total += val
        return total

    def evaluate_grid(self, Q: np.ndarray, P: np.ndarray, hbar: float = 1.0) -> np.ndarray:
        """Vectorized evaluation for 1-dof polynomials on meshgrid arrays."""
        if self.n_dof != 1:
            raise DimensionMismatch("grid evaluation is implemented for n_dof=1")
        out = np.zeros(np.broadcast(Q, P).shape, dtype=complex)
        for ((eq, ep), k), c in self.terms.items():
            out = out + c * (hbar ** k) * (Q ** eq) * (P ** ep)
        return out

    def coefficient_norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.terms.values()))

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(c.imag) <= tol for c in self.terms.values())

    # -- wire format ---------------------------------------------------------

    def to_json(self) -> list[dict]:
        recs = []
        for (exps, k), c in sorted(self.terms.items()):
            recs.append({"exponents": list(exps), "hbar_power": k,
                         "coeff": [c.real, c.imag]})
        return recs

    @classmethod
    def from_json(cls, n_dof: int, records: list[dict]) -> "PhasePolynomial":
        terms = {}
        for rec in records:
            c = rec["coeff"]
            coeff = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
            key = (tuple(rec["exponents"]), int(rec.get("hbar_power", 0)))
            terms[key] = terms.get(key, 0) + coeff
        return cls(n_dof, terms)

    def __repr__(self):
        if not self.terms:
            return "PhasePolynomial(0)"
        names = [f"q{i+1}" for i in range(self.n_dof)] + [f"p{i+1}" for i in range(self.n_dof)]
        parts = []
        for (exps, k), c in sorted(self.terms.items()):
            mon = "*".join(f"{n}^{e}" if e > 1 else n
                           for n, e in zip(names, exps) if e)
            if k:
                mon = f"hbar^{k}" + ("*" + mon if mon else "")
            parts.append(f"({c:g})" + ("*" + mon if mon else ""))
        return "PhasePolynomial(" + " + ".join(parts) + ")"


def poisson_bracket_poly(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """{f, g} = sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i); fixes {q, p} = 1."""
    _check_same_dof(f, g)
    out = PhasePolynomial.zero(f.n_dof)
    for i in range(f.n_dof):
        out = out + f.diff_q(i) * g.diff_p(i) - f.diff_p(i) * g.diff_q(i)
    return out
