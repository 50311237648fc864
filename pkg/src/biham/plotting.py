"""Headless figure rendering for the CLI report path.

Figures are written straight to files (Agg backend) next to the delimited
output; nothing is ever shown interactively.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_wigner", "plot_spectrum", "plot_residual_matrix"]

_FIGSIZE = (5.2, 4.2)
_DPI = 150


def plot_wigner(path: str, q: np.ndarray, p: np.ndarray, W: np.ndarray,
                title: str = "Wigner function") -> str:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    vmax = float(np.max(np.abs(W.real))) or 1.0
    im = ax.pcolormesh(q, p, W.real.T, cmap="RdBu_r", vmin=-vmax, vmax=vmax,
                       shading="auto")
    fig.colorbar(im, ax=ax, label="W(q, p)")
    ax.set_xlabel("q")
    ax.set_ylabel("p")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_spectrum(path: str, eigenvalues: np.ndarray,
                  title: str = "Spectrum") -> str:
    ev = np.asarray(eigenvalues, dtype=complex)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.scatter(ev.real, ev.imag, marker="x", color="tab:blue")
    ax.axhline(0.0, color="0.8", lw=0.8)
    ax.axvline(0.0, color="0.8", lw=0.8)
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_residual_matrix(path: str, R: np.ndarray,
                         title: str = "Involution residuals") -> str:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    data = np.maximum(np.asarray(R, dtype=float), 1e-300)
    im = ax.imshow(np.log10(data), cmap="viridis", origin="lower")
    fig.colorbar(im, ax=ax, label=r"$\log_{10}$ residual")
    ax.set_xlabel("l")
    ax.set_ylabel("k")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
