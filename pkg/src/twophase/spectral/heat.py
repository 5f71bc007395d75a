"""Dirichlet-to-Neumann map of the resolvent heat problem, mode by mode."""

from __future__ import annotations

import numpy as np
from scipy import special

from ..errors import SolveFailure
from .coefficients import Linearization
from .radial import DEFAULT_NODES, ModeGrids, laplacian


def _solve(M, rhs, what):
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolveFailure(f"{what}: singular collocation system") from exc
    if not np.all(np.isfinite(sol)):
        raise SolveFailure(f"{what}: non-finite solution")
    return sol


def heat_profiles(lin: Linearization, l: int, lam: float, grids: ModeGrids):
    """Solve lam rho kappa T - d Lap T = 0 with T(R) = 1, regular at 0, T'(R_outer) = 0."""
    out = []
    for phase, grid in enumerate((grids.inner, grids.outer)):
        coef = lam * lin.rho[phase] * lin.kappa[phase]
        M = coef * np.eye(grid.size) - lin.d[phase] * laplacian(grid, lin.n, grids.symbol)
        rhs = np.zeros(grid.size)
        if phase == 0:
            if l > 0:
                M[0] = 0.0
                M[0, 0] = 1.0
            M[-1] = 0.0
            M[-1, -1] = 1.0
            rhs[-1] = 1.0
        else:
            M[0] = 0.0
            M[0, 0] = 1.0
            rhs[0] = 1.0
            M[-1] = grid.D1[-1]
        out.append(_solve(M, rhs, "heat Dirichlet-to-Neumann"))
    return out


def heat_dtn(lin: Linearization, l: int, lam: float, nodes: int = DEFAULT_NODES) -> float:
    """d1 T1'(R) - d2 T2'(R) for unit Dirichlet data on the sphere."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    grids = ModeGrids.build(lin.n, l, lin.R, lin.R_outer, nodes)
    t1, t2 = heat_profiles(lin, l, lam, grids)
    return float(lin.d[0] * grids.inner.D1[-1] @ t1 - lin.d[1] * grids.outer.D1[0] @ t2)


def heat_dtn_static(lin: Linearization, l: int) -> float:
    """Closed form at lambda = 0 from the harmonic solutions r^l and r^-(l+n-2)."""
    if l == 0:
        return 0.0
    R, Ro, n = lin.R, lin.R_outer, lin.n
    k = l + n - 2
    inner = lin.d[0] * l / R
    # outer: A r^l + B r^-k, A R^l + B R^-k = 1, l A Ro^(l-1) - k B Ro^(-k-1) = 0
    ratio = l * Ro ** (l + k) / k  # B = ratio * A
    A = 1.0 / (R**l + ratio * R**-k)
    B = ratio * A
    outer_slope = l * A * R ** (l - 1) - k * B * R ** (-k - 1)
    return inner - lin.d[1] * outer_slope


def heat_dtn_bessel(lin: Linearization, l: int, lam: float) -> float:
    """Closed form for lambda > 0 via modified Bessel functions (independent oracle)."""
    if lam <= 0:
        raise ValueError("Bessel form needs lambda > 0")
    R, Ro, n = lin.R, lin.R_outer, lin.n
    q = [np.sqrt(lam * lin.rho[i] * lin.kappa[i] / lin.d[i]) for i in range(2)]

    if n == 3:
        def first(x, deriv=False):
            return special.spherical_in(l, x, derivative=deriv)

        def second(x, deriv=False):
            return special.spherical_kn(l, x, derivative=deriv)
    else:
        def first(x, deriv=False):
            return special.ivp(l, x) if deriv else special.iv(l, x)

        def second(x, deriv=False):
            return special.kvp(l, x) if deriv else special.kv(l, x)

    inner = lin.d[0] * q[0] * first(q[0] * R, True) / first(q[0] * R)
    x, xo = q[1] * R, q[1] * Ro
    # outer: a first + b second, Neumann at Ro
    c = -first(xo, True) / second(xo, True)
    val = first(x) + c * second(x)
    slope = q[1] * (first(x, True) + c * second(x, True))
    return float(inner - lin.d[1] * slope / val)
