"""Radially symmetric heat conduction across a fixed spherical interface.

With unequal densities in a rigid container, a radial state cannot change
its phase volumes, so the interface stays put, there is no phase flux and
the velocity vanishes. What remains is conduction in both phases, coupled
through a surface node that carries the surface heat capacity:

    rho kappa(theta) d_t theta = div(d(theta) grad theta)     in each phase,
    kappa_Gamma(theta_G) d_t theta_G = [[d d_r theta]]        on |x| = R,

with theta continuous at R and zero flux at the container wall.

The discretization is a finite-volume scheme in conservative form: cell
energies change by face fluxes only, so total energy is conserved up to the
Newton tolerance. With the default implicit Euler step the entropy increases
at every step by at least dt times the discrete production

    P_h = sum over faces of G (theta_R - theta_L)^2 / (theta_L theta_R),

because entropy is a concave function of energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .. import geometry
from ..errors import RangeExit, StepFailure
from ..thermo import MaterialSet

NEWTON_TOL = 1e-13
NEWTON_MAXITER = 50


@dataclass(frozen=True)
class RadialGrid:
    """Uniform cells in r on (0, R) and (R, R_outer), plus the surface node at R."""

    n: int
    R: float
    R_outer: float
    cells_inner: int
    cells_outer: int

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(0.0, self.R, self.cells_inner + 1),
            np.linspace(self.R, self.R_outer, self.cells_outer + 1),
        )

    @property
    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(0.5 * (e[1:] + e[:-1]) for e in self.edges)

    @property
    def volumes(self) -> tuple[np.ndarray, np.ndarray]:
        s = geometry.unit_sphere_area(self.n)
        return tuple(s * np.diff(e**self.n) / self.n for e in self.edges)

    @property
    def area(self) -> float:
        return geometry.sphere_area(self.n, self.R)

    @property
    def nodes(self) -> np.ndarray:
        """Positions in unknown order: inner centres, R, outer centres."""
        ci, co = self.centers
        return np.concatenate((ci, [self.R], co))

    @property
    def faces(self) -> tuple[np.ndarray, np.ndarray]:
        """(face areas, node spacing) for the links between consecutive unknowns."""
        ei, eo = self.edges
        s = geometry.unit_sphere_area(self.n)
        radii = np.concatenate((ei[1:-1], [self.R, self.R], eo[1:-1]))
        return s * radii ** (self.n - 1), np.diff(self.nodes)

    @property
    def phase_of_link(self) -> np.ndarray:
        return np.concatenate((np.zeros(self.cells_inner, int), np.ones(self.cells_outer, int)))


@dataclass(frozen=True)
class RadialState:
    t: float
    theta1: np.ndarray
    theta2: np.ndarray
    theta_gamma: float

    def vector(self) -> np.ndarray:
        return np.concatenate((self.theta1, [self.theta_gamma], self.theta2))

    @classmethod
    def from_vector(cls, t: float, v: np.ndarray, grid: RadialGrid) -> RadialState:
        n1 = grid.cells_inner
        return cls(t, v[:n1].copy(), v[n1 + 1 :].copy(), float(v[n1]))

    @classmethod
    def from_profile(cls, grid: RadialGrid, profile) -> RadialState:
        ci, co = grid.centers
        return cls(0.0, profile(ci), profile(co), float(profile(np.array([grid.R]))[0]))


class RadialModel:
    """Node-wise capacities, energies, entropies and conductive fluxes."""

    def __init__(self, ms: MaterialSet, grid: RadialGrid):
        self.ms = ms
        self.grid = grid
        vi, vo = grid.volumes
        self.capacity = np.concatenate((ms.phase1.rho * vi, [grid.area], ms.phase2.rho * vo))
        self.area, self.spacing = grid.faces
        self._n1 = grid.cells_inner
        self._link_phase = grid.phase_of_link

    def _per_node(self, theta, bulk, surface):
        n1 = self._n1
        return np.concatenate((bulk(self.ms.phase1, theta[:n1]), [surface(theta[n1])], bulk(self.ms.phase2, theta[n1 + 1 :])))

    def energy_density(self, theta):
        s = self.ms.surface
        return self._per_node(theta, lambda p, t: p.eps(t), lambda t: float(s.eps(t)))

    def heat_capacity(self, theta):
        s = self.ms.surface
        return self._per_node(theta, lambda p, t: p.kappa(t), lambda t: float(s.kappa(t)))

    def entropy_density(self, theta):
        s = self.ms.surface
        return self._per_node(theta, lambda p, t: p.eta(t), lambda t: float(s.eta(t)))

    def energy(self, theta) -> float:
        return float(self.capacity @ self.energy_density(theta))

    def entropy(self, theta) -> float:
        return float(self.capacity @ self.entropy_density(theta))

    def _conductivity(self, theta):
        """Per-link conductivity (mean of its two end values) and the partials."""
        ph = self.ms.phases
        left, right = theta[:-1], theta[1:]
        d_left = np.empty_like(left)
        d_right = np.empty_like(right)
        dd_left = np.empty_like(left)
        dd_right = np.empty_like(right)
        for k, p in enumerate(ph):
            mask = self._link_phase == k
            d_left[mask] = p.d(left[mask])
            d_right[mask] = p.d(right[mask])
            dd_left[mask] = p.d.deriv(left[mask], 1)
            dd_right[mask] = p.d.deriv(right[mask], 1)
        return 0.5 * (d_left + d_right), 0.5 * dd_left, 0.5 * dd_right

    def link_conductance(self, theta):
        d, _, _ = self._conductivity(theta)
        return self.area * d / self.spacing

    def net_flux(self, theta):
        """Heat flowing into each node, and its tridiagonal Jacobian (banded form)."""
        d, dl, dr = self._conductivity(theta)
        g = self.area / self.spacing
        diff = theta[1:] - theta[:-1]
        flux = g * d * diff  # from right node into left node
        net = np.zeros_like(theta)
        net[:-1] += flux
        net[1:] -= flux
        dflux_left = g * (dl * diff - d)
        dflux_right = g * (dr * diff + d)
        jac = np.zeros((3, len(theta)))
        jac[1, :-1] += dflux_left
        jac[1, 1:] -= dflux_right
        jac[0, 1:] += dflux_right  # d net[i] / d theta[i+1]
        jac[2, :-1] -= dflux_left  # d net[i+1] / d theta[i]
        return net, jac

    def production(self, theta) -> float:
        """Discrete entropy production sum G (dtheta)^2 / (theta_L theta_R)."""
        diff = theta[1:] - theta[:-1]
        return float(np.sum(self.link_conductance(theta) * diff**2 / (theta[1:] * theta[:-1])))


def _check_range(theta, theta_c, t):
    if np.any(~(theta > 0)) or np.any(~(theta < theta_c)):
        raise RangeExit(f"temperature left (0, {theta_c}) at t = {t:.6g}", time=t)


def radial_step(
    ms: MaterialSet, grid: RadialGrid, state: RadialState, dt: float, scheme: str = "implicit_euler"
) -> RadialState:
    """One conservative implicit step; ``scheme`` is implicit_euler or trapezoidal."""
    return _step(RadialModel(ms, grid), state, dt, scheme)


def _step(model: RadialModel, state: RadialState, dt: float, scheme: str) -> RadialState:
    if dt <= 0:
        raise ValueError("time step must be positive")
    if scheme not in ("implicit_euler", "trapezoidal"):
        raise ValueError(f"unknown scheme {scheme!r}")
    grid = model.grid
    old = state.vector()
    e_old = model.capacity * model.energy_density(old)
    explicit = 0.0
    weight = 1.0
    if scheme == "trapezoidal":
        explicit = 0.5 * dt * model.net_flux(old)[0]
        weight = 0.5
    theta = old.copy()
    scale = np.maximum(np.abs(e_old), 1.0)
    for _ in range(NEWTON_MAXITER):
        net, jac = model.net_flux(theta)
        resid = model.capacity * model.energy_density(theta) - e_old - weight * dt * net - explicit
        if np.max(np.abs(resid) / scale) < NEWTON_TOL:
            break
        banded = -weight * dt * jac
        banded[1] += model.capacity * model.heat_capacity(theta)
        try:
            step = linalg.solve_banded((1, 1), banded, -resid)
        except (linalg.LinAlgError, ValueError) as exc:
            raise StepFailure(f"Newton linear solve failed at t = {state.t:.6g}") from exc
        theta = theta + step
        if not np.all(np.isfinite(theta)):
            raise StepFailure(f"Newton produced non-finite values at t = {state.t:.6g}")
        _check_range(theta, model.ms.theta_c, state.t + dt)
    else:
        raise StepFailure(f"Newton did not converge at t = {state.t:.6g}")
    _check_range(theta, model.ms.theta_c, state.t + dt)
    return RadialState.from_vector(state.t + dt, theta, grid)


@dataclass
class RadialTrajectory:
    t: np.ndarray
    energy: np.ndarray
    entropy: np.ndarray
    theta_gamma: np.ndarray
    theta_max: np.ndarray
    theta_min: np.ndarray
    production: np.ndarray  # P_h at each recorded state
    final: RadialState
    states: list = field(default_factory=list)

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energy - self.energy[0])) / abs(self.energy[0]))

    @property
    def entropy_increments(self) -> np.ndarray:
        return np.diff(self.entropy)

    def production_defect(self) -> float:
        """|Phi(T) - Phi(0) - int_0^T P_h dt|, the time integral by the trapezoidal rule."""
        produced = np.sum(np.diff(self.t) * 0.5 * (self.production[1:] + self.production[:-1]))
        return float(abs(self.entropy[-1] - self.entropy[0] - produced))


def simulate_radial(
    ms: MaterialSet,
    grid: RadialGrid,
    initial: RadialState,
    T: float,
    dt: float,
    scheme: str = "implicit_euler",
    keep_every: int = 0,
) -> RadialTrajectory:
    model = RadialModel(ms, grid)
    steps = int(round(T / dt))
    theta0 = initial.vector()
    _check_range(theta0, model.ms.theta_c, initial.t)
    rec = {k: [v] for k, v in (
        ("t", initial.t),
        ("energy", model.energy(theta0)),
        ("entropy", model.entropy(theta0)),
        ("theta_gamma", initial.theta_gamma),
        ("theta_max", theta0.max()),
        ("theta_min", theta0.min()),
        ("production", model.production(theta0)),
    )}
    kept = [initial] if keep_every else []
    state = initial
    for k in range(steps):
        state = _step(model, state, dt, scheme)
        v = state.vector()
        rec["t"].append(state.t)
        rec["energy"].append(model.energy(v))
        rec["entropy"].append(model.entropy(v))
        rec["theta_gamma"].append(state.theta_gamma)
        rec["theta_max"].append(v.max())
        rec["theta_min"].append(v.min())
        rec["production"].append(model.production(v))
        if keep_every and (k + 1) % keep_every == 0:
            kept.append(state)
    arrays = {k: np.array(v) for k, v in rec.items()}
    return RadialTrajectory(final=state, states=kept, **arrays)


def initial_family(name: str, grid: RadialGrid, theta_star: float, amplitude: float):
    """Smooth initial temperature profiles used by the experiments."""
    R, Ro = grid.R, grid.R_outer
    if name == "cosine":
        return lambda r: theta_star + amplitude * np.cos(np.pi * r / Ro)
    if name == "hot_core":
        return lambda r: theta_star + amplitude * np.exp(-((r / (0.5 * R)) ** 2))
    if name == "surface_peak":
        return lambda r: theta_star + amplitude * np.exp(-(((r - R) / (0.2 * Ro)) ** 2))
    if name == "two_constant":
        return lambda r: np.where(r < R, theta_star + amplitude, theta_star - amplitude)
    raise ValueError(f"unknown initial family {name!r}")


INITIAL_FAMILIES = ("cosine", "hot_core", "surface_peak")


def exact_production(ms: MaterialSet, grid: RadialGrid, profile, dprofile, points: int = 200) -> float:
    """Quadrature of int d(theta) |theta'|^2 / theta^2 over both phases."""
    total = 0.0
    s = geometry.unit_sphere_area(grid.n)
    for phase, (a, b) in zip(ms.phases, ((0.0, grid.R), (grid.R, grid.R_outer))):
        x, w = np.polynomial.legendre.leggauss(points)
        r = a + 0.5 * (b - a) * (x + 1.0)
        th, dth = profile(r), dprofile(r)
        total += 0.5 * (b - a) * float(w @ (phase.d(th) * dth**2 / th**2 * s * r ** (grid.n - 1)))
    return total
