"""Discrete generalized eigenproblem A z = lam B z of the linearized system, per mode.

Unknowns for l >= 1 are
    [w1 (N1), a1, w2 (N2), a2, b2, T1 (N1), T2 (N2), T_surface, h]
and for l = 0 (no velocity: radial solenoidal fields vanish under no-slip)
    [a1, a2, T1 (N1), T2 (N2), T_surface, h].
B carries rho on momentum rows, rho kappa on heat rows, the surface heat
capacity on the surface-energy row and |[[rho]]| on the kinematic row; all
constraint rows have zero B.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from ..errors import EigensolveFailure
from ..harmonics import multiplicity
from .coefficients import Linearization
from .radial import DEFAULT_NODES, ModeGrids, laplacian
from .stokes import StokesBlock

INFINITE_CUTOFF = 1e8
ZERO_CLUSTER = 1e-6
STABILITY_RTOL = 1e-3
NULL_RTOL = 1e-12


@dataclass
class ModeOperators:
    A: np.ndarray
    B: np.ndarray
    l: int
    columns: dict
    rows: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.A.shape[0]


class _Rows:
    def __init__(self, width):
        self.width = width
        self.A, self.B, self.labels = [], [], []

    def add(self, label, a, b=None):
        self.A.append(a)
        self.B.append(np.zeros(self.width) if b is None else b)
        self.labels.append(label)

    def zero(self):
        return np.zeros(self.width)


def _heat_rows(rows: _Rows, lin: Linearization, grids: ModeGrids, cols: dict):
    """Bulk heat rows, the centre row, the two trace conditions and Neumann."""
    for phase, (grid, key) in enumerate(((grids.inner, "T1"), (grids.outer, "T2"))):
        lap = laplacian(grid, lin.n, grids.symbol)
        start = cols[key].start
        cap = lin.rho[phase] * lin.kappa[phase]
        interior = range(1, grid.size - 1)
        if phase == 0:
            interior = range(0 if grids.l == 0 else 1, grid.size - 1)
            if grids.l > 0:
                a = rows.zero()
                a[start] = 1.0
                rows.add("heat centre", a)
        for i in interior:
            a, b = rows.zero(), rows.zero()
            a[cols[key]] = lin.d[phase] * lap[i]
            b[start + i] = cap
            rows.add(f"heat{phase + 1}", a, b)
    a = rows.zero()
    a[cols["T1"].stop - 1] = 1.0
    a[cols["Ts"]] = -1.0
    rows.add("trace1", a)
    a = rows.zero()
    a[cols["T2"].start] = 1.0
    a[cols["Ts"]] = -1.0
    rows.add("trace2", a)
    a = rows.zero()
    a[cols["T2"]] = grids.outer.D1[-1]
    rows.add("neumann", a)


def _flux_jump(lin, grids, cols, width):
    """Row evaluating [[d T']] = d2 T2'(R) - d1 T1'(R)."""
    a = np.zeros(width)
    a[cols["T2"]] = lin.d[1] * grids.outer.D1[0]
    a[cols["T1"]] -= lin.d[0] * grids.inner.D1[-1]
    return a


def mode_operators(lin: Linearization, l: int, nodes: int = DEFAULT_NODES) -> ModeOperators:
    if l == 0:
        return _radial_operators(lin, nodes)
    grids = ModeGrids.build(lin.n, l, lin.R, lin.R_outer, nodes)
    block = StokesBlock(grids, lin)
    n1, n2 = grids.sizes
    ns = block.size
    cols = dict(block.slices())
    cols["T1"] = slice(ns, ns + n1)
    cols["T2"] = slice(ns + n1, ns + n1 + n2)
    cols["Ts"] = ns + n1 + n2
    cols["h"] = ns + n1 + n2 + 1
    width = ns + n1 + n2 + 2
    rows = _Rows(width)

    # bulk_rows encodes lam rho w - mu Lap w + r P' = 0; the pencil wants A z = lam B z
    A_bulk, B_bulk = block.bulk_rows(0.0, width=width)
    for a, b in zip(A_bulk, B_bulk):
        rows.add("momentum", -a, b)

    f1, f2 = block.interface_functionals(width=width)
    rho1, rho2 = lin.rho
    L = grids.symbol
    jump_flux = (f2["U"] - f1["U"]) / lin.jump_inv_rho
    normal_speed = (rho2 * f2["U"] - rho1 * f1["U"]) / lin.jump_rho
    coupling = lin.theta * lin.dsigma

    rows.add("tangential velocity", f2["V"] - f1["V"])
    a = -(f2["tau"] - f1["tau"])
    a[cols["Ts"]] -= coupling / lin.R
    rows.add("tangential stress", a)
    a = -(f2["tn"] - f1["tn"])
    a[cols["h"]] += lin.sigma * lin.a(l)
    a[cols["Ts"]] -= coupling * lin.H
    rows.add("normal stress", a)
    a = -(f2["tn"] / rho2 - f1["tn"] / rho1) + lin.gamma * jump_flux
    a[cols["Ts"]] += lin.latent
    rows.add("gibbs-thomson", a)

    _heat_rows(rows, lin, grids, cols)

    a = (lin.latent / lin.theta) * jump_flux + _flux_jump(lin, grids, cols, width)
    a += lin.dsigma * (-L * f1["V"] / lin.R - lin.H * normal_speed)
    a[cols["Ts"]] -= lin.d_gamma * L / lin.R**2
    b = np.zeros(width)
    b[cols["Ts"]] = lin.kappa_gamma
    rows.add("surface energy", a, b)

    sign = np.sign(lin.jump_rho)
    a = sign * (rho2 * f2["U"] - rho1 * f1["U"])
    b = np.zeros(width)
    b[cols["h"]] = abs(lin.jump_rho)
    rows.add("kinematic", a, b)
    return _finish(rows, l, cols)


def _radial_operators(lin: Linearization, nodes: int) -> ModeOperators:
    grids = ModeGrids.build(lin.n, 0, lin.R, lin.R_outer, nodes)
    n1, n2 = grids.sizes
    cols = {
        "a1": 0,
        "a2": 1,
        "T1": slice(2, 2 + n1),
        "T2": slice(2 + n1, 2 + n1 + n2),
        "Ts": 2 + n1 + n2,
        "h": 3 + n1 + n2,
    }
    width = 4 + n1 + n2
    rows = _Rows(width)
    rho1, rho2 = lin.rho
    a = rows.zero()
    a[cols["a2"]], a[cols["a1"]] = 1.0, -1.0
    a[cols["h"]] = lin.sigma * lin.a(0)
    a[cols["Ts"]] = -lin.theta * lin.dsigma * lin.H
    rows.add("normal stress", a)
    a = rows.zero()
    a[cols["a2"]], a[cols["a1"]] = 1.0 / rho2, -1.0 / rho1
    a[cols["Ts"]] = lin.latent
    rows.add("gibbs-thomson", a)
    _heat_rows(rows, lin, grids, cols)
    b = rows.zero()
    b[cols["Ts"]] = lin.kappa_gamma
    rows.add("surface energy", _flux_jump(lin, grids, cols, width), b)
    b = rows.zero()
    b[cols["h"]] = abs(lin.jump_rho)
    rows.add("kinematic", rows.zero(), b)
    return _finish(rows, 0, cols)


def _finish(rows: _Rows, l: int, cols: dict) -> ModeOperators:
    A, B = np.array(rows.A), np.array(rows.B)
    if A.shape[0] != A.shape[1]:
        raise EigensolveFailure(f"pencil for l={l} is not square: {A.shape}")
    return ModeOperators(A, B, l, cols, rows.labels)


def pencil_eigenvalues(ops: ModeOperators) -> np.ndarray:
    """Finite generalized eigenvalues, sorted by real part (descending)."""
    try:
        w = linalg.eig(ops.A, ops.B, right=False, homogeneous_eigvals=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise EigensolveFailure(f"QZ failed for l={ops.l}") from exc
    alpha, beta = w
    finite = np.abs(beta) > np.abs(alpha) / INFINITE_CUTOFF
    lam = alpha[finite] / beta[finite]
    return lam[np.argsort(-lam.real, kind="stable")]


def _stable_subset(coarse: np.ndarray, fine: np.ndarray, rtol: float) -> tuple[np.ndarray, np.ndarray]:
    keep = np.zeros(len(coarse), dtype=bool)
    for i, z in enumerate(coarse):
        if len(fine) == 0:
            break
        gap = np.min(np.abs(fine - z))
        if abs(z) < ZERO_CLUSTER:
            keep[i] = gap < ZERO_CLUSTER
        else:
            keep[i] = gap <= rtol * abs(z)
    return coarse[keep], coarse[~keep]


@dataclass
class ModeSpectrum:
    l: int
    physical: np.ndarray
    discretization: np.ndarray
    nodes: int

    @property
    def zero_cluster(self) -> np.ndarray:
        return self.physical[np.abs(self.physical) < ZERO_CLUSTER]

    @property
    def nonzero(self) -> np.ndarray:
        return self.physical[np.abs(self.physical) >= ZERO_CLUSTER]

    @property
    def leading(self) -> complex | None:
        """Rightmost nonzero eigenvalue; of a conjugate pair, the member with Im >= 0."""
        nz = self.nonzero
        if not len(nz):
            return None
        return complex(nz[0].real, abs(nz[0].imag))


def direct_mode_spectrum(
    lin: Linearization, l: int, count: int | None = None, nodes: int = DEFAULT_NODES, rtol: float = STABILITY_RTOL
) -> ModeSpectrum:
    """Eigenvalues stable under doubling of the node count; others are tagged as discretization."""
    coarse = pencil_eigenvalues(mode_operators(lin, l, nodes))
    fine = pencil_eigenvalues(mode_operators(lin, l, 2 * nodes))
    physical, spurious = _stable_subset(coarse, fine, rtol)
    if count is not None:
        physical = physical[:count]
    return ModeSpectrum(l, physical, spurious, nodes)


def _equilibrate(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row and column max-abs scaling; returns (scaled, row_scale, col_scale)."""
    rows = np.abs(M).max(axis=1)
    rows[rows == 0] = 1.0
    scaled = M / rows[:, None]
    cols = np.abs(scaled).max(axis=0)
    cols[cols == 0] = 1.0
    return scaled / cols[None, :], rows, cols


def _null_space(M: np.ndarray, rtol: float) -> np.ndarray:
    """Orthonormalized right null basis of M, rank decided on the equilibrated matrix."""
    scaled, _, cols = _equilibrate(M)
    _, s, vh = linalg.svd(scaled)
    rank = int(np.sum(s > rtol * s[0]))
    basis = vh[rank:].conj().T / cols[:, None]
    if basis.shape[1] == 0:
        return basis
    return linalg.orth(basis)


def nullity(ops: ModeOperators, rtol: float = NULL_RTOL) -> int:
    return _null_space(ops.A, rtol).shape[1]


def kernel_candidates(lin: Linearization, ops: ModeOperators) -> dict[str, np.ndarray]:
    """Explicit zero-eigenvalue vectors: constant temperature, constant h, degree-one h."""
    c = ops.columns
    out = {}
    if ops.l == 0:
        rho1, rho2 = lin.rho
        M = np.array([[-1.0, 1.0], [-1.0 / rho1, 1.0 / rho2]])
        z = np.zeros(ops.size)
        z[c["T1"]] = z[c["T2"]] = z[c["Ts"]] = 1.0
        z[[c["a1"], c["a2"]]] = np.linalg.solve(M, [lin.theta * lin.dsigma * lin.H, -lin.latent])
        out["constant_temperature"] = z
        z = np.zeros(ops.size)
        z[c["h"]] = 1.0
        z[[c["a1"], c["a2"]]] = np.linalg.solve(M, [-lin.sigma * lin.a(0), 0.0])
        out["constant_h"] = z
    elif ops.l == 1:
        z = np.zeros(ops.size)
        z[c["h"]] = 1.0
        out["translation"] = z
    return out


def _residual(ops: ModeOperators, z: np.ndarray) -> float:
    """||A z|| relative to the row scale of A."""
    row_scale = np.abs(ops.A).sum(axis=1)
    row_scale[row_scale == 0] = 1.0
    return float(np.max(np.abs(ops.A @ z) / row_scale) / np.max(np.abs(z)))


@dataclass
class KernelReport:
    dimension: int
    per_mode: dict[int, int]
    residuals: dict[str, float]
    n: int


def kernel_check(lin: Linearization, lmax: int = 6, nodes: int = DEFAULT_NODES) -> KernelReport:
    """Dimension of the zero eigenspace summed over modes with multiplicities."""
    per_mode, residuals = {}, {}
    for l in range(lmax + 1):
        ops = mode_operators(lin, l, nodes)
        per_mode[l] = nullity(ops)
        for name, z in kernel_candidates(lin, ops).items():
            residuals[name] = _residual(ops, z)
    dim = sum(k * multiplicity(lin.n, l) for l, k in per_mode.items())
    return KernelReport(dim, per_mode, residuals, lin.n)


def pencil_semisimple(A: np.ndarray, B: np.ndarray, rtol: float = NULL_RTOL, tol: float = 1e-8) -> bool:
    """lam = 0 is semisimple iff W^H B N is nonsingular (N, W right and left null bases of A)."""
    N = _null_space(A, rtol)
    if N.shape[1] == 0:
        return True
    W = _null_space(A.conj().T, rtol)
    if W.shape[1] != N.shape[1]:
        return False
    M = W.conj().T @ B @ N
    s = linalg.svd(M, compute_uv=False)
    scale = max(np.linalg.norm(B, 2), 1.0)
    return bool(s.min() > tol * scale)


def semisimplicity_check(lin: Linearization, lmax: int = 6, nodes: int = DEFAULT_NODES) -> bool:
    return all(pencil_semisimple(op.A, op.B) for op in (mode_operators(lin, l, nodes) for l in range(lmax + 1)))
