"""Dense-matrix substrate: structure checks, spectra with degeneracy
clusters, commutants, and JSON (de)serialization of real/complex matrices.

All matrices are plain numpy arrays; the helpers here only add the
structure-aware conveniences the rest of the package leans on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MatrixShapeError",
    "SpectralError",
    "Spectrum",
    "matrix_norm",
    "is_symmetric",
    "is_skew_symmetric",
    "is_hermitian",
    "symmetric_part",
    "skew_part",
    "spectral_decompose",
    "commutant_basis",
    "rank_sequence",
    "matrix_to_json",
    "matrix_from_json",
]


class MatrixShapeError(ValueError):
    """Raised when an operation receives a matrix of incompatible shape."""


class SpectralError(RuntimeError):
    """Raised when an eigen-decomposition fails to converge; carries the residual."""


def matrix_norm(M: np.ndarray) -> float:
    """Frobenius norm, the scale used by every relative tolerance in the package."""
    return float(np.linalg.norm(M))


def _rel_scale(M: np.ndarray) -> float:
    n = matrix_norm(M)
    return n if n > 0.0 else 1.0


def is_symmetric(M: np.ndarray, tol: float = 1e-12) -> bool:
    M = np.asarray(M)
    return matrix_norm(M - M.T) <= tol * _rel_scale(M)


def is_skew_symmetric(M: np.ndarray, tol: float = 1e-12) -> bool:
    M = np.asarray(M)
    return matrix_norm(M + M.T) <= tol * _rel_scale(M)


def is_hermitian(M: np.ndarray, tol: float = 1e-12) -> bool:
    M = np.asarray(M)
    return matrix_norm(M - M.conj().T) <= tol * _rel_scale(M)


def symmetric_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def skew_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M - M.T)


def require_square(M: np.ndarray, what: str = "matrix") -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise MatrixShapeError(f"{what} must be square, got shape {M.shape}")
    return M


# ---------------------------------------------------------------------------
# Spectra with degeneracy clusters
# ---------------------------------------------------------------------------

@dataclass
class Spectrum:
    """Eigen-decomposition with eigenvalues grouped into degeneracy clusters.

    ``clusters`` partitions ``range(len(eigenvalues))``; ``defective`` flags
    clusters whose eigenvector span is deficient (Jordan chains present), in
    which case ``generalized_ranks`` holds the rank sequence of (M - lam*I)^j.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    cluster_tol: float
    clusters: list[list[int]] = field(default_factory=list)
    defective: list[bool] = field(default_factory=list)
    generalized_ranks: dict[int, list[int]] = field(default_factory=dict)

    def cluster_values(self) -> list[complex]:
        """One representative (mean) eigenvalue per cluster."""
        return [complex(np.mean(self.eigenvalues[c])) for c in self.clusters]


def _group_by_tolerance(values: np.ndarray, tol_abs: float) -> list[list[int]]:
    """Greedy clustering of complex values: indices within tol_abs of a seed."""
    order = np.lexsort((values.imag, values.real))
    clusters: list[list[int]] = []
    for idx in order:
        placed = False
        for c in clusters:
            if abs(values[idx] - values[c[0]]) <= tol_abs:
                c.append(int(idx))
                placed = True
                break
        if not placed:
            clusters.append([int(idx)])
    return clusters


def rank_sequence(M: np.ndarray, lam: complex, jmax: int | None = None,
                  tol: float = 1e-8) -> list[int]:
    """Ranks of (M - lam*I)^j for j = 1..jmax; encodes the Jordan structure at lam."""
    M = require_square(M)
    n = M.shape[0]
    if jmax is None:
        jmax = n
    A = M - lam * np.eye(n)
    ranks = []
    P = np.eye(n, dtype=complex)
    for _ in range(jmax):
        P = P @ A
        s = np.linalg.svd(P, compute_uv=False)
        thresh = tol * (s[0] if s.size and s[0] > 0 else 1.0)
        ranks.append(int(np.sum(s > thresh)))
    return ranks


def spectral_decompose(M: np.ndarray, cluster_tol: float = 1e-8) -> Spectrum:
    """Full eigen-decomposition with relative-tolerance degeneracy clustering.

    Defective clusters are not an error: they are flagged and the rank
    sequence of the shifted powers is recorded in place of a Jordan form.
    """
    M = require_square(M).astype(complex)
    n = M.shape[0]
    scale = _rel_scale(M)
    try:
        w, V = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise SpectralError(f"eigen-decomposition did not converge: {exc}") from exc

    resid = matrix_norm(M @ V - V * w[None, :])
    if resid > 1e-8 * scale * n:
        raise SpectralError(f"eigenpair residual {resid:.3e} exceeds 1e-8*||M||")

    spec = Spectrum(eigenvalues=w, eigenvectors=V, cluster_tol=cluster_tol)
    spec.clusters = _group_by_tolerance(w, cluster_tol * max(scale, 1.0))
    for ci, c in enumerate(spec.clusters):
        mult = len(c)
        if mult == 1:
            spec.defective.append(False)
            continue
        lam = complex(np.mean(w[c]))
        # geometric multiplicity: dim ker(M - lam I)
        s = np.linalg.svd(M - lam * np.eye(n), compute_uv=False)
        geo = int(np.sum(s <= cluster_tol * max(scale, 1.0)))
        if geo < mult:
            spec.defective.append(True)
            spec.generalized_ranks[ci] = rank_sequence(M, lam, jmax=n)
        else:
            spec.defective.append(False)
    return spec


# ---------------------------------------------------------------------------
# Commutants
# ---------------------------------------------------------------------------

def commutant_basis(G: np.ndarray, tol: float = 1e-10) -> list[np.ndarray]:
    """Basis of {T : GT - TG = 0}, from the nullspace of the vectorized commutator.

    Works over the reals for real G and over the complexes otherwise; the
    space always contains the identity, so the result is never empty.
    """
    G = require_square(G)
    n = G.shape[0]
    eye = np.eye(n)
    # vec(GT - TG) = (I (x) G - G^T (x) I) vec(T), column-major vec
    L = np.kron(eye, G) - np.kron(G.T, eye)
    _, s, Vh = np.linalg.svd(L)
    s = np.concatenate([s, np.zeros(max(0, Vh.shape[0] - s.size))])
    scale = max(s[0], 1.0) if s.size else 1.0
    null_mask = s <= tol * scale
    basis = []
    for row in Vh[null_mask]:
        T = row.reshape(n, n, order="F")
        if np.iscomplexobj(G):
            basis.append(T)
        else:
            # the nullspace of a real L has a real basis; SVD may return
            # complex rows only if G was complex
            basis.append(T.real if np.allclose(T.imag, 0) else T)
    return basis


# ---------------------------------------------------------------------------
# JSON wire format: nested arrays of [re, im] pairs
# ---------------------------------------------------------------------------

def matrix_to_json(M: np.ndarray) -> list:
    """Nested lists of [re, im] pairs (always the complex wire form)."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(data: list) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; plain floats are read as real entries."""
    rows = []
    for row in data:
        r = []
        for z in row:
            if isinstance(z, (list, tuple)):
                r.append(complex(z[0], z[1]))
            else:
                r.append(complex(z))
        rows.append(r)
    M = np.array(rows, dtype=complex)
    if np.allclose(M.imag, 0.0):
        return M.real
    return M
