"""Scalar dispersion function F_l(lam) = lam + tau_l(lam) sigma a_l for one mode."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from ..errors import GammaZero, ModeExcluded
from .coefficients import Linearization
from .heat import heat_dtn
from .radial import DEFAULT_NODES
from .stokes import stokes_mode_operator

ROOT_TOL = 1e-10


def default_scan() -> np.ndarray:
    return np.concatenate(([0.0], np.logspace(-4, 3, 64)))


def coupling_vector(lin: Linearization, l: int) -> np.ndarray:
    """Per-mode coefficients of (sigma' H, -latent/theta, sigma' grad)."""
    return np.array([lin.dsigma * lin.H, -lin.latent / lin.theta, lin.dsigma * np.sqrt(lin.symbol(l)) / lin.R])


@dataclass(frozen=True)
class DispersionSample:
    lam: float
    l: int
    F: float
    dtn: float
    s11: float
    s22: float
    s33: float
    s12: float
    s13: float
    s23: float
    L_inv: float
    r1: float
    r2: float
    r: float
    tau: float
    a_l: float

    def as_dict(self) -> dict:
        return asdict(self)


def assemble_dispersion(lin: Linearization, l: int, lam: float, nodes: int = DEFAULT_NODES) -> DispersionSample:
    if l == 0:
        raise ModeExcluded("degree 0 violates the zero-mean condition on h and is not a dispersion mode")
    if lin.gamma == 0.0:
        raise GammaZero("kinetic coefficient is zero; dispersion route unavailable")
    dtn = heat_dtn(lin, l, lam, nodes)
    S = stokes_mode_operator(lin, l, lam, nodes).S
    S = 0.5 * (S + S.T)
    q = coupling_vector(lin, l)
    Sq = S @ q
    L_inv = lin.kappa_gamma * lam + lin.d_gamma * lin.symbol(l) / lin.R**2 + dtn + lin.theta * q @ Sq
    reduced = S - lin.theta * np.outer(Sq, Sq) / L_inv
    r1, r, r2 = reduced[0, 0], reduced[1, 0], reduced[1, 1]
    tau = r1 - r * r / (r2 + 1.0 / lin.gamma)
    a_l = lin.a(l)
    F = lam + tau * lin.sigma * a_l
    return DispersionSample(
        float(lam), l, float(F), float(dtn),
        float(S[0, 0]), float(S[1, 1]), float(S[2, 2]), float(S[0, 1]), float(S[0, 2]), float(S[1, 2]),
        float(L_inv), float(r1), float(r2), float(r), float(tau), float(a_l),
    )


def find_roots(func: Callable[[float], float], grid, tol: float = ROOT_TOL) -> list[float]:
    """Sign-change scan of func on grid followed by Brent refinement.

    Grid points where |func| < tol are returned as roots themselves.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.array([func(x) for x in grid])
    roots = [float(x) for x, v in zip(grid, vals) if abs(v) < tol]
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if abs(a) < tol or abs(b) < tol or a * b > 0:
            continue
        x = optimize.brentq(func, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-14)
        if abs(func(x)) < max(tol, 1e-8 * max(abs(a), abs(b))):
            roots.append(float(x))
    return sorted(roots)


def dispersion_roots(lin: Linearization, l: int, scan=None, nodes: int = DEFAULT_NODES) -> list[float]:
    grid = default_scan() if scan is None else scan
    return find_roots(lambda x: assemble_dispersion(lin, l, x, nodes).F, grid)
