"""Pointwise residuals of the interface conditions on a sphere, and initial-data checks.

Fields are sampled on a polar grid (n = 2) or an axisymmetric grid in the
polar angle (n = 3), one radial grid per phase, with the interface at the
sphere r = R at the evaluation instant. Its motion enters only through the
normal velocity V. Radial derivatives at r = R use five-point one-sided
finite differences (fourth order); angular derivatives and surface
quadrature are spectral (Fourier for n = 2, cosine/sine series with Fejer
quadrature on the midpoint polar grid for n = 3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .. import geometry
from ..equilibria import EquilibriumState, equilibrium_pressures
from ..errors import GridMismatch
from ..thermo import MaterialSet

RESIDUAL_NAMES = (
    "tangential_velocity",
    "normal_velocity_jump",
    "temperature_continuity",
    "normal_stress",
    "tangential_stress",
    "surface_energy",
    "gibbs_thomson",
    "kinematic",
)
COMPATIBILITY_TOL = 1e-8
STENCIL_POINTS = 5


def fornberg_weights(x0: float, nodes: np.ndarray, order: int) -> np.ndarray:
    """Finite-difference weights for the order-th derivative at x0 (Fornberg's recursion)."""
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, nodes[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, -1, -1):
                c[j, k] = (c4 * c[j, k] - (k * c[j, k - 1] if k else 0.0)) / c3
        c1 = c2
    return c[:, order]


@dataclass(frozen=True)
class PhaseFields:
    """Samples on r (ascending) x angles: radial and angular velocity, pressure, temperature."""

    r: np.ndarray
    u_r: np.ndarray
    u_angle: np.ndarray
    pressure: np.ndarray
    theta: np.ndarray

    def shape_ok(self, angles: int) -> bool:
        shape = (len(self.r), angles)
        return all(np.shape(a) == shape for a in (self.u_r, self.u_angle, self.pressure, self.theta))


@dataclass(frozen=True)
class FieldSnapshot:
    n: int
    R: float
    R_outer: float
    angles: np.ndarray
    phase1: PhaseFields
    phase2: PhaseFields
    theta_gamma: np.ndarray
    normal_velocity: np.ndarray
    theta_gamma_rate: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        geometry.check_dimension(self.n)
        k = len(self.angles)
        if not (self.phase1.shape_ok(k) and self.phase2.shape_ok(k)):
            raise GridMismatch("phase field arrays do not match (radial points, angles)")
        for name in ("theta_gamma", "normal_velocity", "theta_gamma_rate"):
            if np.shape(getattr(self, name)) != (k,):
                raise GridMismatch(f"{name} must have one value per angle")
        r1, r2 = self.phase1.r, self.phase2.r
        if len(r1) < STENCIL_POINTS or len(r2) < STENCIL_POINTS:
            raise GridMismatch(f"need at least {STENCIL_POINTS} radial points per phase")
        if not (np.isclose(r1[-1], self.R, rtol=1e-14) and np.isclose(r2[0], self.R, rtol=1e-14)):
            raise GridMismatch("phase grids must end and start at the interface radius")
        if not np.isclose(r2[-1], self.R_outer, rtol=1e-14):
            raise GridMismatch("outer grid must end at the container radius")
        if np.any(np.diff(r1) <= 0) or np.any(np.diff(r2) <= 0):
            raise GridMismatch("radial grids must be strictly increasing")
        expected = angle_grid(self.n, k)
        if not np.allclose(self.angles, expected, rtol=0, atol=1e-12):
            raise GridMismatch("angles must be the standard grid from angle_grid")

    @property
    def phases(self):
        return (self.phase1, self.phase2)


def angle_grid(n: int, points: int) -> np.ndarray:
    """Uniform periodic angles for n = 2; cell-centred polar angles on (0, pi) for n = 3."""
    if n == 2:
        return 2 * np.pi * np.arange(points) / points
    return (np.arange(points) + 0.5) * np.pi / points


@lru_cache(maxsize=32)
def _polar_tables(points: int):
    """Fejer weights for int f sin(a) da and cosine/sine-series derivative matrices on (0, pi)."""
    a = angle_grid(3, points)
    j = np.arange(1, points // 2 + 1)
    fejer = (2.0 / points) * (1 - 2 * np.sum(np.cos(2 * np.outer(a, j)) / (4 * j**2 - 1), axis=1))
    k = np.arange(1, points)
    sin_ka, cos_ka = np.sin(np.outer(a, k)), np.cos(np.outer(a, k))
    even = -(2.0 / points) * (sin_ka * k) @ cos_ka.T
    odd = (2.0 / points) * (cos_ka * k) @ sin_ka.T
    for t in (fejer, even, odd):
        t.setflags(write=False)
    return fejer, even, odd


def surface_weights(n: int, R: float, angles: np.ndarray) -> np.ndarray:
    k = len(angles)
    if n == 2:
        return np.full(k, 2 * np.pi * R / k)
    return 2 * np.pi * R**2 * _polar_tables(k)[0]


def surface_norm(n: int, R: float, angles: np.ndarray, values) -> float:
    values = np.broadcast_to(np.asarray(values, dtype=float), angles.shape)
    return float(np.sqrt(max(surface_weights(n, R, angles) @ values**2, 0.0)))


def angular_derivative(n: int, angles: np.ndarray, f: np.ndarray, parity: int = 1) -> np.ndarray:
    """Spectral d/d(angle) along the last axis.

    For n = 2 the angle is periodic; for n = 3 ``parity`` says whether f is
    even (+1, cosine series) or odd (-1, sine series) under reflection at the poles.
    """
    f = np.asarray(f, dtype=float)
    k = f.shape[-1]
    if n == 2:
        wave = np.fft.rfftfreq(k, d=1.0 / k)
        spec = np.fft.rfft(f, axis=-1) * 1j * wave
        if k % 2 == 0:
            spec[..., -1] = 0.0
        return np.fft.irfft(spec, n=k, axis=-1)
    _, even, odd = _polar_tables(k)
    return f @ (even if parity > 0 else odd).T


def surface_divergence_tangential(n: int, R: float, angles: np.ndarray, tangential: np.ndarray) -> np.ndarray:
    """Surface divergence of a tangential field given by its angular component on r = R."""
    if n == 2:
        return angular_derivative(2, angles, tangential) / R
    s = np.sin(angles)
    return angular_derivative(3, angles, s * tangential) / (R * s)


def _radial_derivative_at(phase: PhaseFields, values: np.ndarray, at_end: bool) -> np.ndarray:
    r = phase.r
    idx = slice(-STENCIL_POINTS, None) if at_end else slice(0, STENCIL_POINTS)
    w = fornberg_weights(r[-1] if at_end else r[0], r[idx], 1)
    return w @ values[idx]


def _interface_traces(snap: FieldSnapshot):
    out = []
    for phase, at_end in ((snap.phase1, True), (snap.phase2, False)):
        row = -1 if at_end else 0
        d = lambda v: _radial_derivative_at(phase, v, at_end)  # noqa: E731
        out.append(
            {
                "u_r": phase.u_r[row],
                "u_angle": phase.u_angle[row],
                "pressure": phase.pressure[row],
                "theta": phase.theta[row],
                "du_r": d(phase.u_r),
                "du_angle": d(phase.u_angle),
                "dtheta": d(phase.theta),
            }
        )
    return out


def interface_residual_fields(ms: MaterialSet, snap: FieldSnapshot) -> dict[str, np.ndarray]:
    """Residual of each interface condition as a function of angle."""
    n, R, ang = snap.n, snap.R, snap.angles
    t1, t2 = _interface_traces(snap)
    p1, p2 = ms.phase1, ms.phase2
    rho1, rho2 = p1.rho, p2.rho
    th = np.asarray(snap.theta_gamma, dtype=float)
    V = np.asarray(snap.normal_velocity, dtype=float)
    surf = ms.surface
    H = geometry.mean_curvature(n, R)
    mu1, mu2 = p1.mu(t1["theta"]), p2.mu(t2["theta"])

    jump_inv_rho = 1.0 / rho2 - 1.0 / rho1
    jump_un = t2["u_r"] - t1["u_r"]
    j = jump_un / jump_inv_rho
    tangential = 0.5 * (t1["u_angle"] + t2["u_angle"])

    def dang(f):
        return angular_derivative(n, ang, f)

    # 2 D(u) nu . e_angle = (1/r) d_angle u_r + d_r u_angle - u_angle / r
    shear1 = mu1 * (dang(t1["u_r"]) / R + t1["du_angle"] - t1["u_angle"] / R)
    shear2 = mu2 * (dang(t2["u_r"]) / R + t2["du_angle"] - t2["u_angle"] / R)
    dtheta_gamma = dang(th)
    normal_viscous1 = 2 * mu1 * t1["du_r"]
    normal_viscous2 = 2 * mu2 * t2["du_r"]

    surface_flux = surf.d_gamma(th) * dtheta_gamma / R
    conduction = surface_divergence_tangential(n, R, ang, surface_flux)
    div_surface_velocity = surface_divergence_tangential(n, R, ang, tangential) + (n - 1) / R * V

    latent = p2.psi.deriv(th, 1) * th - p1.psi.deriv(th, 1) * th
    return {
        "tangential_velocity": t2["u_angle"] - t1["u_angle"],
        "normal_velocity_jump": rho1 * (t1["u_r"] - V) - rho2 * (t2["u_r"] - V),
        "temperature_continuity": np.maximum(np.abs(t1["theta"] - th), np.abs(t2["theta"] - th)),
        "normal_stress": jump_inv_rho * j**2
        - (normal_viscous2 - normal_viscous1)
        + (t2["pressure"] - t1["pressure"])
        - surf.sigma(th) * H,
        "tangential_stress": -(shear2 - shear1) - surf.sigma.deriv(th, 1) * dtheta_gamma / R,
        "surface_energy": surf.kappa(th) * snap.theta_gamma_rate
        - conduction
        - (p2.d(t2["theta"]) * t2["dtheta"] - p1.d(t1["theta"]) * t1["dtheta"])
        - latent * j
        - surf.gamma(th) * j**2
        - surf.latent(th) * div_surface_velocity,
        "gibbs_thomson": p2.psi(th)
        - p1.psi(th)
        + 0.5 * (1 / rho2**2 - 1 / rho1**2) * j**2
        - (normal_viscous2 / rho2 - normal_viscous1 / rho1)
        + (t2["pressure"] / rho2 - t1["pressure"] / rho1)
        + surf.gamma(th) * j,
        "kinematic": V - (rho2 * t2["u_r"] - rho1 * t1["u_r"]) / (rho2 - rho1),
    }


def interface_residuals(ms: MaterialSet, snap: FieldSnapshot) -> dict[str, float]:
    """Surface L2 norm of each interface residual."""
    fields = interface_residual_fields(ms, snap)
    return {name: surface_norm(snap.n, snap.R, snap.angles, fields[name]) for name in RESIDUAL_NAMES}


def _bulk_divergence(n: int, angles: np.ndarray, phase: PhaseFields) -> np.ndarray:
    r = phase.r
    keep = r > 0
    r = r[keep]
    ur, ua = phase.u_r[keep], phase.u_angle[keep]
    radial = np.gradient(r[:, None] ** (n - 1) * ur, r, axis=0, edge_order=2) / r[:, None] ** (n - 1)
    if n == 2:
        angular = angular_derivative(2, angles, ua) / r[:, None]
    else:
        s = np.sin(angles)
        angular = angular_derivative(3, angles, s * ua) / (r[:, None] * s)
    return radial + angular


@dataclass(frozen=True)
class CompatibilityReport:
    residuals: dict
    scales: dict
    tol: float

    @property
    def passed(self) -> dict:
        return {k: v <= self.tol * (1.0 + self.scales[k]) for k, v in self.residuals.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def to_dict(self) -> dict:
        return {"tol": self.tol, "residuals": self.residuals, "scales": self.scales, "passed": self.passed}


def compatibility_check(ms: MaterialSet, snap: FieldSnapshot, tol: float = COMPATIBILITY_TOL) -> CompatibilityReport:
    """Divergence, Marangoni balance, wall conditions and interface continuity of initial data."""
    n, ang = snap.n, snap.angles
    fields = interface_residual_fields(ms, snap)
    speed = max(np.max(np.abs(p.u_r)) + np.max(np.abs(p.u_angle)) for p in snap.phases)
    temp = max(np.max(np.abs(p.theta)) for p in snap.phases)
    outer = snap.phase2
    wall = surface_norm(n, snap.R_outer, ang, np.hypot(outer.u_r[-1], outer.u_angle[-1]))
    neumann = surface_norm(n, snap.R_outer, ang, _radial_derivative_at(outer, outer.theta, True))
    div = max(float(np.max(np.abs(_bulk_divergence(n, ang, p)))) for p in snap.phases)
    norm = lambda name: surface_norm(n, snap.R, ang, fields[name])  # noqa: E731
    residuals = {
        "div_free": div,
        "marangoni": norm("tangential_stress"),
        "no_slip": wall,
        "neumann": neumann,
        "tangential_velocity": norm("tangential_velocity"),
        "temperature_continuity": norm("temperature_continuity"),
    }
    scales = {
        "div_free": speed,
        "marangoni": speed,
        "no_slip": speed,
        "neumann": temp,
        "tangential_velocity": speed,
        "temperature_continuity": temp,
    }
    return CompatibilityReport(residuals, scales, tol)


def _uniform_phase_grids(R: float, R_outer: float, points: int):
    return np.linspace(0.0, R, points), np.linspace(R, R_outer, points)


def snapshot_from_functions(
    ms: MaterialSet,
    n: int,
    R: float,
    R_outer: float,
    radial_points: int,
    angular_points: int,
    fields,
    grids=None,
) -> FieldSnapshot:
    """Sample ``fields(phase, r, angle) -> (u_r, u_angle, pressure, theta)`` on a grid.

    ``fields`` may also expose ``interface(angle) -> (theta_gamma, V, rate)``;
    otherwise theta_gamma is the inner trace and V and the rate are zero.
    """
    del ms
    ang = angle_grid(n, angular_points)
    r1, r2 = grids if grids is not None else _uniform_phase_grids(R, R_outer, radial_points)
    phases = []
    for k, r in enumerate((r1, r2)):
        rr, aa = np.meshgrid(r, ang, indexing="ij")
        ur, ua, p, th = (np.broadcast_to(np.asarray(v, dtype=float), rr.shape).copy() for v in fields(k, rr, aa))
        phases.append(PhaseFields(r, ur, ua, p, th))
    if hasattr(fields, "interface"):
        tg, V, rate = (np.broadcast_to(np.asarray(v, dtype=float), ang.shape).copy() for v in fields.interface(ang))
    else:
        tg, V, rate = phases[0].theta[-1].copy(), np.zeros_like(ang), np.zeros_like(ang)
    return FieldSnapshot(n, R, R_outer, ang, phases[0], phases[1], tg, V, rate)


def equilibrium_snapshot(eq: EquilibriumState, radial_points: int = 16, angular_points: int = 32) -> FieldSnapshot:
    """Rest state at theta_* with the equilibrium pressures; only the m = 1 concentric case."""
    if eq.m != 1 or np.any(eq.spheres.centers != 0):
        raise GridMismatch("snapshots describe one sphere centred in the container")
    pi = (eq.pi1, eq.pi2)

    def fields(k, r, a):
        return 0.0, 0.0, pi[k], eq.theta_star

    return snapshot_from_functions(
        eq.materials, eq.n, eq.radius, eq.domain.radius, radial_points, angular_points, fields
    )


def radial_snapshot(ms: MaterialSet, grid, state, rate: float = 0.0, angular_points: int = 8) -> FieldSnapshot:
    """Embed a radial finite-volume state (u = 0) as a snapshot.

    Radial nodes are the cell centres plus the interface and wall nodes; the phase
    pressures are the rest pressures consistent with theta_Gamma, and
    ``rate`` is the surface temperature rate supplied by the caller.
    """
    ci, co = grid.centers
    # wall value from the even quadratic through the last two centres (zero slope at the wall)
    d = grid.R_outer - co[-2:]
    wall = (state.theta2[-1] * d[0] ** 2 - state.theta2[-2] * d[1] ** 2) / (d[0] ** 2 - d[1] ** 2)
    r1 = np.concatenate((ci, [grid.R]))
    r2 = np.concatenate(([grid.R], co, [grid.R_outer]))
    th1 = np.concatenate((state.theta1, [state.theta_gamma]))
    th2 = np.concatenate(([state.theta_gamma], state.theta2, [wall]))
    pi1, pi2 = equilibrium_pressures(ms, state.theta_gamma, grid.R, grid.n)
    ang = angle_grid(grid.n, angular_points)
    phases = []
    for r, th, pi in ((r1, th1, pi1), (r2, th2, pi2)):
        shape = (len(r), len(ang))
        zero = np.zeros(shape)
        phases.append(PhaseFields(r, zero, zero.copy(), np.full(shape, pi), np.repeat(th[:, None], len(ang), axis=1)))
    k = len(ang)
    return FieldSnapshot(
        grid.n, grid.R, grid.R_outer, ang, phases[0], phases[1],
        np.full(k, state.theta_gamma), np.zeros(k), np.full(k, float(rate)),
        meta={"t": state.t},
    )
