"""Contraction and Schur-complement properties behind the reduced dispersion relation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import NotPSD
from .coefficients import Linearization
from .dispersion import coupling_vector
from .heat import heat_dtn
from .radial import DEFAULT_NODES
from .stokes import stokes_mode_operator, symmetrized

PSD_TOL = 1e-8


def psd_sqrt(S: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of the symmetric part of S."""
    w, v = linalg.eigh(symmetrized(S))
    if w.size and w.min() < -tol * max(1.0, abs(w).max()):
        raise NotPSD(f"smallest eigenvalue {w.min():.3e}")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def contraction_norm(A: np.ndarray, B: np.ndarray) -> float:
    """Spectral norm of A (A^H A + B)^-1 A^H for positive definite B."""
    A = np.atleast_2d(A)
    C = A.conj().T @ A + B
    K = A @ linalg.solve(C, A.conj().T, assume_a="her")
    return float(linalg.norm(K, 2))


def contraction_check(lin: Linearization, l: int, lam: float, nodes: int = DEFAULT_NODES) -> float:
    """Norm of theta S^1/2 q L q^T S^1/2 for one mode (a rank-one matrix)."""
    S = stokes_mode_operator(lin, l, lam, nodes).S
    root = psd_sqrt(S)
    if l == 0:
        q = coupling_vector(lin, 1)[:2]
        heat_part = lin.kappa_gamma * lam + heat_dtn(lin, 0, lam, nodes)
    else:
        q = coupling_vector(lin, l)
        heat_part = lin.kappa_gamma * lam + lin.d_gamma * lin.symbol(l) / lin.R**2 + heat_dtn(lin, l, lam, nodes)
    A = np.sqrt(lin.theta) * (root @ q)[:, None]
    if heat_part <= 0 and not np.any(A):
        return 0.0
    return contraction_norm(A, np.array([[heat_part]]))


@dataclass
class SchurReport:
    passed: bool
    min_eigenvalue: float
    block_psd: bool


def schur_check(S: np.ndarray, R: np.ndarray, T: np.ndarray, tol: float = 1e-10) -> SchurReport:
    """Check that S - R^H T^-1 R is PSD when [[S, R^H], [R, T]] is PSD.

    The report also states whether the block matrix itself is PSD, so an
    indefinite fixture is flagged rather than silently passing.
    """
    block = np.block([[S, R.conj().T], [R, T]])
    block_min = float(linalg.eigvalsh(symmetrized(block)).min())
    schur = S - R.conj().T @ linalg.solve(T, R)
    smin = float(linalg.eigvalsh(symmetrized(schur)).min())
    scale = max(1.0, float(np.abs(block).max()))
    return SchurReport(smin >= -tol * scale, smin, block_min >= -tol * scale)
