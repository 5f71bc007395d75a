"""Equilibria: m equal spheres of phase 1 at rest, at uniform temperature.

Given the total mass the common radius follows from the phase-1 volume;
given the total energy the temperature follows from a scalar root find; the
two pressures then follow from the Young-Laplace and Gibbs-Thomson relations.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import geometry
from .errors import (
    DegenerateConfiguration,
    EmptyPhase,
    NoRootInRange,
    QuadratureFailure,
    SingularSystem,
    TemperatureOutOfRange,
)
from .thermo import MaterialSet

TOL_ROOT = 1e-12
ENERGY_SCAN_POINTS = 512


class NonMonotoneWarning(UserWarning):
    """The energy-temperature relation crosses the target more than once."""


@dataclass(frozen=True)
class Domain:
    n: int
    radius: float

    def __post_init__(self):
        geometry.check_dimension(self.n)
        if not self.radius > 0:
            raise ValueError("container radius must be positive")

    @property
    def volume(self) -> float:
        return geometry.ball_volume(self.n, self.radius)


@dataclass(frozen=True)
class SphereFamily:
    centers: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "centers", c)
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")

    @property
    def m(self) -> int:
        return len(self.centers)

    @property
    def n(self) -> int:
        return self.centers.shape[1]

    @property
    def phase1_volume(self) -> float:
        return self.m * geometry.ball_volume(self.n, self.radius)

    @property
    def sphere_area(self) -> float:
        return geometry.sphere_area(self.n, self.radius)

    @property
    def area(self) -> float:
        return self.m * self.sphere_area


@dataclass(frozen=True)
class EquilibriumState:
    domain: Domain
    spheres: SphereFamily
    theta_star: float
    pi1: float
    pi2: float
    materials: MaterialSet = field(repr=False)

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def m(self) -> int:
        return self.spheres.m

    @property
    def radius(self) -> float:
        return self.spheres.radius

    @property
    def H_star(self) -> float:
        return geometry.mean_curvature(self.n, self.radius)

    def residuals(self) -> tuple[float, float]:
        """(Young-Laplace, Gibbs-Thomson) residuals, relative to their scales."""
        ms, th = self.materials, self.theta_star
        p1, p2 = ms.phase1, ms.phase2
        s = float(ms.surface.sigma(th))
        yl = (self.pi2 - self.pi1) - s * self.H_star
        jump_psi = float(p2.psi(th) - p1.psi(th))
        gt = jump_psi + self.pi2 / p2.rho - self.pi1 / p1.rho
        scale_yl = max(abs(self.pi1), abs(self.pi2), abs(s * self.H_star), 1e-300)
        scale_gt = max(abs(jump_psi), abs(self.pi1 / p1.rho), abs(self.pi2 / p2.rho), 1e-300)
        return yl / scale_yl, gt / scale_gt


def radius_from_mass(dom: Domain, ms: MaterialSet, M0: float, m: int) -> float:
    rho1, rho2 = ms.phase1.rho, ms.phase2.rho
    if rho1 == rho2:
        raise SingularSystem("equal densities: the radius is not determined by the mass")
    v1 = (M0 - rho2 * dom.volume) / (rho1 - rho2)
    if not (0 < v1 < dom.volume):
        raise EmptyPhase(f"phase-1 volume {v1:.6g} outside (0, {dom.volume:.6g})")
    if m < 1:
        raise ValueError("need at least one sphere")
    return (v1 / (m * geometry.unit_ball_volume(dom.n))) ** (1.0 / dom.n)


def total_mass(ms: MaterialSet, dom: Domain, spheres: SphereFamily) -> float:
    v1 = spheres.phase1_volume
    return ms.phase1.rho * v1 + ms.phase2.rho * (dom.volume - v1)


def equilibrium_energy(ms: MaterialSet, dom: Domain, spheres: SphereFamily, theta) -> np.ndarray:
    """E(theta) for a resting state at uniform temperature theta."""
    v1 = spheres.phase1_volume
    v2 = dom.volume - v1
    p1, p2 = ms.phase1, ms.phase2
    return (
        p1.rho * p1.eps(theta) * v1
        + p2.rho * p2.eps(theta) * v2
        + ms.surface.eps(theta) * spheres.area
    )


def temperature_from_energy(ms: MaterialSet, dom: Domain, spheres: SphereFamily, E0: float) -> float:
    """Invert theta -> E(theta) on (0, theta_c).

    Sign changes of E - E0 are located on a 512-point scan and refined with
    Brent's method. Several crossings trigger NonMonotoneWarning and the
    smallest root is returned.
    """
    tc = ms.theta_c
    grid = np.concatenate(([tc * 1e-12], np.linspace(0.0, tc, ENERGY_SCAN_POINTS + 2)[1:-1], [tc * (1 - 1e-12)]))

    def f(t):
        return float(equilibrium_energy(ms, dom, spheres, t)) - E0

    vals = np.array([f(t) for t in grid])
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0:
            roots.append(optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    if not roots:
        raise NoRootInRange(f"E(theta) does not reach E0 = {E0:.6g} on (0, {tc:.6g})")
    if len(roots) > 1:
        warnings.warn(f"energy crosses E0 at {roots}; returning the smallest", NonMonotoneWarning)
    return roots[0]


def equilibrium_pressures(ms: MaterialSet, theta_star: float, R_star: float, n: int) -> tuple[float, float]:
    """Pressures from [[pi]] = sigma H and [[psi]] + [[pi/rho]] = 0."""
    if not 0 < theta_star < ms.theta_c:
        raise TemperatureOutOfRange(f"theta = {theta_star} outside (0, {ms.theta_c})")
    rho1, rho2 = ms.phase1.rho, ms.phase2.rho
    if rho1 == rho2:
        raise SingularSystem("equal densities make the pressure system singular")
    jump_pi = float(ms.surface.sigma(theta_star)) * geometry.mean_curvature(n, R_star)
    jump_psi = float(ms.phase2.psi(theta_star) - ms.phase1.psi(theta_star))
    # pi2 = pi1 + jump_pi ; pi1 (1/rho2 - 1/rho1) = -jump_psi - jump_pi / rho2
    pi1 = (-jump_psi - jump_pi / rho2) / (1.0 / rho2 - 1.0 / rho1)
    return pi1, pi1 + jump_pi


@dataclass
class Diagnostics:
    ok: bool
    messages: list[str]


def validate_nondegenerate(spheres: SphereFamily, dom: Domain) -> Diagnostics:
    msgs = []
    R = spheres.radius
    for i, c in enumerate(spheres.centers):
        reach = np.linalg.norm(c) + R
        if not reach < dom.radius:
            msgs.append(f"ball {i} reaches {reach:.6g} >= container radius {dom.radius:.6g}")
    for i, j in itertools.combinations(range(spheres.m), 2):
        dist = np.linalg.norm(spheres.centers[i] - spheres.centers[j])
        if not dist > 2 * R:
            msgs.append(f"balls {i} and {j} at distance {dist:.6g} <= {2 * R:.6g}")
    return Diagnostics(not msgs, msgs)


def default_centers(n: int, m: int, R: float, container_radius: float) -> np.ndarray:
    """Place m centers evenly on a circle in the first coordinate plane."""
    if m == 1:
        return np.zeros((1, n))
    lower = R / np.sin(np.pi / m)
    upper = container_radius - R
    if not lower < upper:
        raise DegenerateConfiguration(f"{m} balls of radius {R:.6g} do not fit on a ring")
    ring = 0.5 * (lower + upper)
    angles = 2 * np.pi * np.arange(m) / m
    c = np.zeros((m, n))
    c[:, 0] = ring * np.cos(angles)
    c[:, 1] = ring * np.sin(angles)
    return c


def build_equilibrium(
    ms: MaterialSet,
    dom: Domain,
    m: int = 1,
    *,
    mass: float | None = None,
    radius: float | None = None,
    energy: float | None = None,
    theta: float | None = None,
    centers=None,
) -> EquilibriumState:
    """Assemble an equilibrium from (mass or radius) and (energy or temperature)."""
    if (mass is None) == (radius is None):
        raise ValueError("give exactly one of mass or radius")
    if (energy is None) == (theta is None):
        raise ValueError("give exactly one of energy or theta")
    R = radius_from_mass(dom, ms, mass, m) if radius is None else float(radius)
    if m * geometry.ball_volume(dom.n, R) >= dom.volume:
        raise DegenerateConfiguration("spheres would fill the container")
    c = default_centers(dom.n, m, R, dom.radius) if centers is None else centers
    spheres = SphereFamily(c, R)
    diag = validate_nondegenerate(spheres, dom)
    if not diag.ok:
        raise DegenerateConfiguration("; ".join(diag.messages))
    th = temperature_from_energy(ms, dom, spheres, energy) if theta is None else float(theta)
    pi1, pi2 = equilibrium_pressures(ms, th, R, dom.n)
    return EquilibriumState(dom, spheres, th, pi1, pi2, ms)


def free_parameters(n: int, m: int) -> int:
    """Dimension of the equilibrium manifold when mass is not fixed."""
    return m * n + 2


@dataclass(frozen=True)
class RadialField:
    """Samples of a field with their volume quadrature weights in one phase."""

    values: np.ndarray
    weights: np.ndarray

    def integrate(self, f=lambda v: v) -> float:
        return float(np.dot(self.weights, f(np.asarray(self.values))))


@dataclass(frozen=True)
class ConservedTotals:
    mass: float
    energy: float
    entropy: float
    bulk_entropy: float
    surface_entropy: float
    kinetic: float


def _as_field(value, volume):
    if isinstance(value, RadialField):
        vals = np.asarray(value.values, dtype=float)
        w = np.asarray(value.weights, dtype=float)
        if vals.shape != w.shape or not np.all(np.isfinite(w)) or np.any(w < 0):
            raise QuadratureFailure("field samples and weights do not match")
        if abs(w.sum() - volume) > 1e-10 * max(volume, 1.0):
            raise QuadratureFailure(f"weights integrate to {w.sum():.12g}, phase volume is {volume:.12g}")
        return RadialField(vals, w)
    return RadialField(np.array([float(value)]), np.array([volume]))


def total_functionals(
    ms: MaterialSet,
    dom: Domain,
    spheres: SphereFamily,
    theta,
    theta_gamma=None,
    speed=(0.0, 0.0),
) -> ConservedTotals:
    """Mass, energy and entropy of a state with a fixed spherical interface.

    ``theta`` is a constant or a pair of per-phase ``RadialField``; the
    surface temperature defaults to theta when theta is constant. ``speed``
    gives |u| per phase in the same form.
    """
    v1 = spheres.phase1_volume
    vols = (v1, dom.volume - v1)
    if isinstance(theta, (tuple, list)):
        thetas = [_as_field(t, v) for t, v in zip(theta, vols)]
        if theta_gamma is None:
            raise ValueError("surface temperature required with field-valued theta")
    else:
        thetas = [_as_field(theta, v) for v in vols]
        theta_gamma = theta if theta_gamma is None else theta_gamma
    speeds = [_as_field(s, v) for s, v in zip(speed, vols)]
    for t, s in zip(thetas, speeds):
        if len(s.values) > 1 and s.values.shape != t.values.shape:
            raise QuadratureFailure("speed and temperature grids differ")

    mass = kinetic = bulk_energy = bulk_entropy = 0.0
    for ph, th, sp, vol in zip(ms.phases, thetas, speeds, vols):
        mass += ph.rho * vol
        bulk_energy += ph.rho * th.integrate(ph.eps)
        bulk_entropy += ph.rho * th.integrate(ph.eta)
        kinetic += 0.5 * ph.rho * sp.integrate(np.square)
    s = ms.surface
    area = spheres.area
    surface_energy = float(s.eps(theta_gamma)) * area
    surface_entropy = float(s.eta(theta_gamma)) * area
    return ConservedTotals(
        mass=mass,
        energy=bulk_energy + surface_energy + kinetic,
        entropy=bulk_entropy + surface_entropy,
        bulk_entropy=bulk_entropy,
        surface_entropy=surface_entropy,
        kinetic=kinetic,
    )
