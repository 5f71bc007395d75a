"""Interface-data-to-trace operator of the two-phase resolvent Stokes problem.

For a degree-l mode (l >= 1) the velocity is u = U(r) Y e_r + V(r) grad_S Y
with grad_S the gradient on the unit sphere. Incompressibility ties V to
w = r U through V = (w' + (n-2) w / r) / L, L = l(l+n-2), and taking the
radial component of the momentum equation gives the scalar problem

    lam rho w - mu Lap_l w + r P' = 0,

with harmonic pressure P = a r^l (+ b r^-(l+n-2) in the shell). The data are
the jumps of normal traction, normal traction over density, and tangential
traction; the outputs are [[rho U]]/[[rho]], [[U]]/[[1/rho]] and V(R).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import chebyshev
from ..errors import SolveFailure
from .coefficients import Linearization
from .radial import DEFAULT_NODES, ModeGrids, laplacian


@dataclass(frozen=True)
class StokesBlock:
    """Column layout [w1 (N1), a1, w2 (N2), a2, b2] and the bulk rows."""

    grids: ModeGrids
    lin: Linearization

    @property
    def n1(self) -> int:
        return self.grids.inner.size

    @property
    def n2(self) -> int:
        return self.grids.outer.size

    @property
    def size(self) -> int:
        return self.n1 + self.n2 + 3

    def slices(self, offset: int = 0):
        n1, n2 = self.n1, self.n2
        return {
            "w1": slice(offset, offset + n1),
            "a1": offset + n1,
            "w2": slice(offset + n1 + 1, offset + n1 + 1 + n2),
            "a2": offset + n1 + 1 + n2,
            "b2": offset + n1 + 2 + n2,
        }

    def interface_functionals(self, offset: int = 0, width: int | None = None):
        """Row vectors evaluating U, V, t_n, tau of each phase at r = R."""
        lin, g = self.lin, self.grids
        n, L, l = lin.n, g.symbol, g.l
        R = lin.R
        k = l + n - 2
        width = self.size + offset if width is None else width
        sl = self.slices(offset)
        out = []
        for phase, (grid, idx, wkey) in enumerate(((g.inner, -1, "w1"), (g.outer, 0, "w2"))):
            e = np.zeros(grid.size)
            e[idx] = 1.0
            d1, d2 = grid.D1[idx], grid.D2[idx]

            def row(vec):
                full = np.zeros(width)
                full[sl[wkey]] = vec
                return full

            U = row(e / R)
            dU = row(d1 / R - e / R**2)
            V = row((d1 + (n - 2) * e / R) / L)
            dV = row((d2 + (n - 2) * (d1 / R - e / R**2)) / L)
            P = np.zeros(width)
            if phase == 0:
                P[sl["a1"]] = R**l
            else:
                P[sl["a2"]] = R**l
                P[sl["b2"]] = R**-k
            mu = lin.mu[phase]
            tn = -P + 2 * mu * dU
            tau = mu * (dV - V / R + U / R)
            out.append({"U": U, "V": V, "tn": tn, "tau": tau})
        return out

    def bulk_rows(self, lam: float, offset: int = 0, width: int | None = None):
        """Momentum rows (with their mass rows), the centre and the no-slip rows.

        Returns (A_rows, B_rows); there are N1 + N2 - 1 rows in total.
        """
        lin, g = self.lin, self.grids
        n, L, l = lin.n, g.symbol, g.l
        k = l + n - 2
        width = self.size + offset if width is None else width
        sl = self.slices(offset)
        A, B = [], []
        for phase, (grid, wkey) in enumerate(((g.inner, "w1"), (g.outer, "w2"))):
            r = grid.r
            lap = laplacian(grid, n, L)
            mu, rho = lin.mu[phase], lin.rho[phase]
            for i in range(1, grid.size - 1):
                a = np.zeros(width)
                b = np.zeros(width)
                a[sl[wkey]] = -mu * lap[i]
                a[sl[wkey].start + i] += lam * rho
                b[sl[wkey].start + i] = rho
                if phase == 0:
                    a[sl["a1"]] = l * r[i] ** l
                else:
                    a[sl["a2"]] = l * r[i] ** l
                    a[sl["b2"]] = -k * r[i] ** -k
                A.append(a)
                B.append(b)
            if phase == 0:
                a = np.zeros(width)
                a[sl["w1"].start] = 1.0
                A.append(a)
                B.append(np.zeros(width))
            else:
                for vec in (np.eye(grid.size)[-1], grid.D1[-1]):
                    a = np.zeros(width)
                    a[sl["w2"]] = vec
                    A.append(a)
                    B.append(np.zeros(width))
        return np.array(A), np.array(B)


@dataclass(frozen=True)
class StokesResult:
    S: np.ndarray
    S_unit: np.ndarray
    lam: float
    l: int
    grids: ModeGrids
    solutions: np.ndarray
    block: StokesBlock

    def fields(self, column: int):
        """(w1, a1, w2, a2, b2) for unit datum number `column` (unit scaling)."""
        sl = self.block.slices()
        z = self.solutions[:, column]
        return z[sl["w1"]], z[sl["a1"]], z[sl["w2"]], z[sl["a2"]], z[sl["b2"]]


def _interface_matrix(block: StokesBlock, lam: float):
    """Square system with the four interface rows last: V, g1, g2, g3."""
    A, _ = block.bulk_rows(lam)
    (f1, f2) = block.interface_functionals()
    lin = block.lin
    rows = [
        f2["V"] - f1["V"],
        -(f2["tn"] - f1["tn"]),
        -(f2["tn"] / lin.rho[1] - f1["tn"] / lin.rho[0]),
        -(f2["tau"] - f1["tau"]),
    ]
    outputs = np.array(
        [
            (lin.rho[1] * f2["U"] - lin.rho[0] * f1["U"]) / lin.jump_rho,
            (f2["U"] - f1["U"]) / lin.jump_inv_rho,
            f1["V"],
        ]
    )
    return np.vstack([A, rows]), outputs


def stokes_mode_operator(lin: Linearization, l: int, lam: float, nodes: int = DEFAULT_NODES) -> StokesResult:
    """Symmetric 3x3 (l >= 1) or 2x2 zero (l = 0) mode operator."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    grids = ModeGrids.build(lin.n, max(l, 1), lin.R, lin.R_outer, nodes)
    block = StokesBlock(grids, lin)
    if l == 0:
        # radial divergence-free fields vanish in the ball and, by no-slip, in the shell
        return StokesResult(np.zeros((2, 2)), np.zeros((2, 2)), lam, 0, grids, np.zeros((block.size, 2)), block)
    M, outputs = _interface_matrix(block, lam)
    rhs = np.zeros((block.size, 3))
    rhs[-3:, :] = np.eye(3)
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolveFailure("Stokes mode system is singular") from exc
    if not np.all(np.isfinite(sol)):
        raise SolveFailure("Stokes mode system produced non-finite values")
    S_unit = outputs @ sol
    root = np.sqrt(grids.symbol)
    scale = np.array([1.0, 1.0, root])
    S = scale[:, None] * S_unit / scale[None, :]
    return StokesResult(S, S_unit, lam, l, grids, sol, block)


def symmetrized(S: np.ndarray) -> np.ndarray:
    return 0.5 * (S + S.T)


def _profiles(lin, grids, w, phase):
    """U, U', V, V' of one phase as callables via barycentric interpolation."""
    n, L = lin.n, grids.symbol
    grid = grids.inner if phase == 0 else grids.outer
    if phase == 0:
        parity = 1 if grids.l % 2 == 0 else -1
        nodes, vals = chebyshev.unfold(grid.r, w, parity)
        _, d1 = chebyshev.unfold(grid.r, grid.D1 @ w, -parity)
        _, d2 = chebyshev.unfold(grid.r, grid.D2 @ w, parity)
    else:
        nodes, vals, d1, d2 = grid.r, w, grid.D1 @ w, grid.D2 @ w

    def at(r):
        f = chebyshev.interpolate(nodes, vals, r)
        f1 = chebyshev.interpolate(nodes, d1, r)
        f2 = chebyshev.interpolate(nodes, d2, r)
        U = f / r
        dU = f1 / r - f / r**2
        V = (f1 + (n - 2) * f / r) / L
        dV = (f2 + (n - 2) * (f1 / r - f / r**2)) / L
        return U, dU, V, dV

    return at


def energy_integrand(lin: Linearization, L: int, lam: float, phase: int, U, dU, V, dV, r):
    """lam rho |u|^2 + 2 mu |D u|^2 integrated over the unit sphere, per unit radius."""
    n = lin.n
    rho, mu = lin.rho[phase], lin.mu[phase]
    kinetic = lam * rho * (U**2 + L * V**2)
    shear = 0.5 * L * (dV - V / r + U / r) ** 2
    rest = (V**2 * (L**2 - (n - 2) * L) - 2 * L * U * V + (n - 1) * U**2) / r**2
    return (kinetic + 2 * mu * (dU**2 + shear + rest)) * r ** (n - 1)


def energy_check(result: StokesResult, g: np.ndarray, quad_points: int = 96) -> tuple[float, float]:
    """Return ((S g | g), lam int rho|u|^2 + 2 int mu |Du|^2) for normalized data g.

    Data and outputs are surface-L2 coefficients, so (S g | g) is the plain
    dot product; the field is rebuilt from the unit-scaling solution.
    """
    lin, grids = result.block.lin, result.grids
    L = grids.symbol
    scale = np.array([1.0, 1.0, np.sqrt(L)])
    g_unit = g / scale
    # normalized surface coefficients carry R^((n-1)/2) relative to pointwise values
    g_point = g_unit / lin.R ** ((lin.n - 1) / 2)
    z = result.solutions @ g_point
    sl = result.block.slices()
    lhs = float(g @ result.S @ g)
    total = 0.0
    r_in, w_in = chebyshev.gauss_legendre(0.0, lin.R, quad_points)
    r_out, w_out = chebyshev.gauss_legendre(lin.R, lin.R_outer, quad_points)
    for phase, (key, r, w) in enumerate((("w1", r_in, w_in), ("w2", r_out, w_out))):
        at = _profiles(lin, grids, z[sl[key]], phase)
        total += float(w @ energy_integrand(lin, L, result.lam, phase, *at(r), r))
    return lhs, total
