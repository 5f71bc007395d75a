"""First and second variations of entropy, mass and energy at rest states.

A perturbation direction is (v, bulk temperature, surface temperature, h).
Surface quantities are stored per sphere as coefficients in the harmonic
basis that is orthonormal on that sphere, so that

    integral of h over sphere k      = h[k, 0] * sqrt(|sphere k|)
    integral of h**2 over sphere k   = sum(h[k]**2).

The interface moves by h along the normal pointing out of phase 1; the area
then changes by (n-1)/R * integral of h, so the curvature entering the
first variations is -(n-1)/R.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg

from . import harmonics
from .geometry import ball_volume, sphere_area
from .equilibria import EquilibriumState, RadialField
from .errors import GridMismatch
from .thermo import MaterialSet

DEFINITENESS_TOL = 1e-10
DEFAULT_LMAX = 8


@dataclass(frozen=True)
class RestState:
    """A state at rest with piecewise-constant temperatures and m equal spheres."""

    materials: MaterialSet
    n: int
    m: int
    radius: float
    container_volume: float
    theta1: float
    theta2: float
    theta_gamma: float

    @classmethod
    def from_equilibrium(cls, eq: EquilibriumState, theta=None) -> RestState:
        th = eq.theta_star if theta is None else theta
        return cls(eq.materials, eq.n, eq.m, eq.radius, eq.domain.volume, th, th, th)

    @property
    def sphere_area(self) -> float:
        return sphere_area(self.n, self.radius)

    @property
    def phase_volumes(self) -> tuple[float, float]:
        v1 = self.m * ball_volume(self.n, self.radius)
        return v1, self.container_volume - v1

    @property
    def temperatures(self) -> tuple[float, float]:
        return self.theta1, self.theta2

    @property
    def area_curvature(self) -> float:
        """Rate of change of area per unit normal displacement, (n-1)/R."""
        return (self.n - 1) / self.radius


def _zero_bulk():
    return (0.0, 0.0)


@dataclass(frozen=True)
class Perturbation:
    """Direction (v, theta_var, theta_gamma_var, h).

    ``velocity`` and ``theta_var`` hold one entry per phase, each a constant
    or a ``RadialField`` of samples with volume weights (velocity entries are
    speeds |v|). ``theta_gamma_var`` and ``h`` have shape (m, ncoef).
    """

    n: int
    lmax: int
    theta_gamma_var: np.ndarray
    h: np.ndarray
    theta_var: tuple = field(default_factory=_zero_bulk)
    velocity: tuple = field(default_factory=_zero_bulk)

    def __post_init__(self):
        object.__setattr__(self, "theta_gamma_var", np.atleast_2d(np.asarray(self.theta_gamma_var, float)))
        object.__setattr__(self, "h", np.atleast_2d(np.asarray(self.h, float)))
        if self.lmax < 2:
            raise ValueError("harmonic cutoff must be at least 2")
        ncoef = harmonics.coefficient_count(self.n, self.lmax)
        for name in ("theta_gamma_var", "h"):
            arr = getattr(self, name)
            if arr.shape[1] != ncoef:
                raise GridMismatch(f"{name} has {arr.shape[1]} coefficients, expected {ncoef}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite coefficients")
        if self.theta_gamma_var.shape != self.h.shape:
            raise GridMismatch("surface temperature and h have different sphere counts")

    @property
    def m(self) -> int:
        return self.h.shape[0]

    @classmethod
    def zero(cls, n: int, m: int, lmax: int = DEFAULT_LMAX) -> Perturbation:
        ncoef = harmonics.coefficient_count(n, lmax)
        return cls(n, lmax, np.zeros((m, ncoef)), np.zeros((m, ncoef)))

    @classmethod
    def constant_h(cls, values, n: int, radius: float, lmax: int = DEFAULT_LMAX) -> Perturbation:
        """h equal to values[k] everywhere on sphere k."""
        values = np.asarray(values, float)
        base = cls.zero(n, len(values), lmax)
        h = base.h.copy()
        h[:, 0] = values * np.sqrt(sphere_area(n, radius))
        return replace(base, h=h)


def _check(state: RestState, pert: Perturbation):
    if pert.n != state.n or pert.m != state.m:
        raise GridMismatch(
            f"perturbation (n={pert.n}, m={pert.m}) does not match state (n={state.n}, m={state.m})"
        )


def _bulk_fields(values, volumes):
    out = []
    for v, vol in zip(values, volumes):
        if isinstance(v, RadialField):
            if np.shape(v.values) != np.shape(v.weights):
                raise GridMismatch("field samples and weights differ in shape")
            if abs(np.sum(v.weights) - vol) > 1e-9 * max(vol, 1.0):
                raise GridMismatch("field weights do not integrate to the phase volume")
            out.append(v)
        else:
            out.append(RadialField(np.array([float(v)]), np.array([vol])))
    return out


def _surface_mean_integral(state: RestState, coeffs: np.ndarray) -> float:
    """Integral over all spheres of the function with these coefficients."""
    return float(np.sum(coeffs[:, 0]) * np.sqrt(state.sphere_area))


def _as_state(eq) -> RestState:
    return eq if isinstance(eq, RestState) else RestState.from_equilibrium(eq)


def first_variation_entropy(eq, pert: Perturbation) -> float:
    state = _as_state(eq)
    _check(state, pert)
    ms = state.materials
    dtheta = _bulk_fields(pert.theta_var, state.phase_volumes)
    bulk = sum(
        ph.rho * ph.kappa(th) / th * f.integrate()
        for ph, th, f in zip(ms.phases, state.temperatures, dtheta)
    )
    s, tg = ms.surface, state.theta_gamma
    surface = s.kappa(tg) / tg * _surface_mean_integral(state, pert.theta_gamma_var)
    jump_rho_eta = ms.phase2.rho * ms.phase2.eta(state.theta2) - ms.phase1.rho * ms.phase1.eta(state.theta1)
    curvature = -state.area_curvature
    shape = -(jump_rho_eta + s.eta(tg) * curvature) * _surface_mean_integral(state, pert.h)
    return float(bulk + surface + shape)


def first_variation_mass(eq, pert: Perturbation) -> float:
    state = _as_state(eq)
    _check(state, pert)
    ms = state.materials
    return float(-(ms.phase2.rho - ms.phase1.rho) * _surface_mean_integral(state, pert.h))


def first_variation_energy(eq, pert: Perturbation, velocity=(0.0, 0.0)) -> float:
    """Energy variation; ``velocity`` is the state's speed field per phase.

    At rest states the velocity term (rho u | v) and the kinetic jump vanish.
    """
    state = _as_state(eq)
    _check(state, pert)
    ms = state.materials
    vols = state.phase_volumes
    dtheta = _bulk_fields(pert.theta_var, vols)
    u = _bulk_fields(velocity, vols)
    v = _bulk_fields(pert.velocity, vols)
    kinetic = 0.0
    for ph, uf, vf in zip(ms.phases, u, v):
        if len(uf.values) == len(vf.values):
            kinetic += ph.rho * float(np.dot(uf.weights, uf.values * vf.values))
        elif np.all(uf.values == 0) or np.all(vf.values == 0):
            continue
        else:
            raise GridMismatch("velocity fields on different grids")
    bulk = sum(
        ph.rho * ph.kappa(th) * f.integrate() for ph, th, f in zip(ms.phases, state.temperatures, dtheta)
    )
    s, tg = ms.surface, state.theta_gamma
    surface = s.kappa(tg) * _surface_mean_integral(state, pert.theta_gamma_var)
    jump_rho_eps = ms.phase2.rho * ms.phase2.eps(state.theta2) - ms.phase1.rho * ms.phase1.eps(state.theta1)
    curvature = -state.area_curvature
    shape = -(jump_rho_eps + s.eps(tg) * curvature) * _surface_mean_integral(state, pert.h)
    return float(kinetic + bulk + surface + shape)


@dataclass(frozen=True)
class Multipliers:
    lam: float
    mu: float


def lagrange_multipliers(eq: EquilibriumState) -> Multipliers:
    """mu = -1/theta and lambda from the h-direction of the variational equation."""
    ms, th = eq.materials, eq.theta_star
    jump_rho = ms.phase2.rho - ms.phase1.rho
    jump_rho_psi = ms.phase2.rho * ms.phase2.psi(th) - ms.phase1.rho * ms.phase1.psi(th)
    curvature = -(eq.n - 1) / eq.radius
    lam = (jump_rho_psi + ms.surface.sigma(th) * curvature) / (jump_rho * th)
    return Multipliers(float(lam), -1.0 / th)


def probe_directions(n: int, m: int, state: RestState, lmax: int = DEFAULT_LMAX) -> dict[str, Perturbation]:
    """Unit-norm probes: constant bulk and surface temperature, and h of degree 0, 1, 2."""
    zero = Perturbation.zero(n, m, lmax)
    v1, v2 = state.phase_volumes
    idx = harmonics.mode_indices(n, lmax)
    first = {deg: idx.index(next(p for p in idx if p[0] == deg)) for deg in (0, 1, 2)}
    probes = {
        "theta_phase1": replace(zero, theta_var=(1.0 / np.sqrt(v1), 0.0)),
        "theta_phase2": replace(zero, theta_var=(0.0, 1.0 / np.sqrt(v2))),
    }
    for deg, col in first.items():
        coeffs = np.zeros_like(zero.h)
        coeffs[0, col] = 1.0
        if deg == 0:
            probes["theta_gamma_const"] = replace(zero, theta_gamma_var=coeffs)
        probes[f"h_l{deg}"] = replace(zero, h=coeffs)
    return probes


def lagrange_residual(eq: EquilibriumState, state: RestState | None = None, lmax: int = DEFAULT_LMAX) -> float:
    """max over probes of |Phi' + lambda M' + mu E'| with multipliers fixed by eq.

    Passing a different ``state`` measures how far it is from satisfying the
    stationarity conditions of ``eq``.
    """
    return max(abs(v) for v in lagrange_residuals(eq, state, lmax).values())


def lagrange_residuals(eq: EquilibriumState, state: RestState | None = None, lmax: int = DEFAULT_LMAX) -> dict[str, float]:
    mult = lagrange_multipliers(eq)
    st = RestState.from_equilibrium(eq) if state is None else state
    out = {}
    for label, p in probe_directions(eq.n, eq.m, st, lmax).items():
        out[label] = (
            first_variation_entropy(st, p)
            + mult.lam * first_variation_mass(st, p)
            + mult.mu * first_variation_energy(st, p)
        )
    return out


def curvature_variation_symbol(n: int, degree, radius: float):
    """Action of the linearized mean curvature on degree-l harmonics."""
    degree = np.asarray(degree)
    return ((n - 1) - degree * (degree + n - 2)) / radius**2


def second_variation_form(eq: EquilibriumState, pert: Perturbation) -> float:
    """<D z | z> for the constrained entropy Hessian at an equilibrium."""
    state = RestState.from_equilibrium(eq)
    _check(state, pert)
    ms, th = eq.materials, eq.theta_star
    vols = state.phase_volumes
    kinetic = sum(ph.rho * f.integrate(np.square) for ph, f in zip(ms.phases, _bulk_fields(pert.velocity, vols)))
    bulk = sum(
        ph.rho * ph.kappa(th) * f.integrate(np.square)
        for ph, f in zip(ms.phases, _bulk_fields(pert.theta_var, vols))
    )
    surface_heat = ms.surface.kappa(th) * float(np.sum(pert.theta_gamma_var**2))
    hprime = curvature_variation_symbol(eq.n, harmonics.degrees(eq.n, pert.lmax), eq.radius)
    shape = ms.surface.sigma(th) * th * float(np.sum(hprime * pert.h**2))
    return float(-kinetic - (bulk + surface_heat - shape) / th)


def constraint_values(eq: EquilibriumState, pert: Perturbation) -> tuple[float, float]:
    """(energy-kernel functional, total integral of h)."""
    state = RestState.from_equilibrium(eq)
    _check(state, pert)
    ms, th = eq.materials, eq.theta_star
    bulk = sum(
        ph.rho * ph.kappa(th) * f.integrate()
        for ph, f in zip(ms.phases, _bulk_fields(pert.theta_var, state.phase_volumes))
    )
    energy = bulk + ms.surface.kappa(th) * _surface_mean_integral(state, pert.theta_gamma_var)
    return float(energy), _surface_mean_integral(state, pert.h)


def _shift(value, beta):
    if isinstance(value, RadialField):
        return RadialField(np.asarray(value.values) + beta, value.weights)
    return value + beta


def constraint_projection(eq: EquilibriumState, pert: Perturbation) -> Perturbation:
    """Remove the total mean of h and shift both temperatures by one constant."""
    state = RestState.from_equilibrium(eq)
    _check(state, pert)
    ms, th = eq.materials, eq.theta_star
    root_area = np.sqrt(state.sphere_area)
    total_area = state.m * state.sphere_area

    h = pert.h.copy()
    h[:, 0] -= _surface_mean_integral(state, pert.h) / total_area * root_area

    energy, _ = constraint_values(eq, pert)
    v1, v2 = state.phase_volumes
    capacity = (
        ms.phase1.rho * ms.phase1.kappa(th) * v1
        + ms.phase2.rho * ms.phase2.kappa(th) * v2
        + ms.surface.kappa(th) * total_area
    )
    beta = -energy / capacity
    tg = pert.theta_gamma_var.copy()
    tg[:, 0] += beta * root_area
    theta_var = tuple(_shift(v, beta) for v in pert.theta_var)
    return replace(pert, h=h, theta_gamma_var=tg, theta_var=theta_var)


@dataclass
class QuadraticFormReport:
    classification: str
    eigenvalues: np.ndarray
    positive_dimension: int
    null_dimension: int
    null_vectors: np.ndarray
    labels: list[str]
    witness: Perturbation | None = None
    witness_value: float | None = None
    value: float = 0.0

    @property
    def indefinite(self) -> bool:
        return self.classification == "indefinite"


def _basis(eq: EquilibriumState, lmax: int):
    """Orthonormal probe basis: its diagonal form values and constraint rows."""
    state = RestState.from_equilibrium(eq)
    ms, th = eq.materials, eq.theta_star
    n, m = eq.n, eq.m
    v1, v2 = state.phase_volumes
    root_area = np.sqrt(state.sphere_area)
    idx = harmonics.mode_indices(n, lmax)
    hprime = curvature_variation_symbol(n, np.array([d for d, _ in idx]), eq.radius)
    sigma, kg = float(ms.surface.sigma(th)), float(ms.surface.kappa(th))

    labels, diag, energy_row, mass_row = [], [], [], []
    for i, (ph, vol) in enumerate(zip(ms.phases, (v1, v2)), start=1):
        labels.append(f"theta{i}")
        diag.append(-ph.rho * ph.kappa(th) / th)
        energy_row.append(ph.rho * ph.kappa(th) * np.sqrt(vol))
        mass_row.append(0.0)
    for k in range(m):
        for j, (deg, order) in enumerate(idx):
            labels.append(f"theta_gamma[{k}]({deg},{order})")
            diag.append(-kg / th)
            energy_row.append(kg * root_area if j == 0 else 0.0)
            mass_row.append(0.0)
    for k in range(m):
        for j, (deg, order) in enumerate(idx):
            labels.append(f"h[{k}]({deg},{order})")
            diag.append(sigma * hprime[j])
            energy_row.append(0.0)
            mass_row.append(root_area if j == 0 else 0.0)
    return labels, np.array(diag, float), np.array([energy_row, mass_row], float)


def classify_definiteness(eq: EquilibriumState, lmax: int = DEFAULT_LMAX, tol: float = DEFINITENESS_TOL) -> QuadraticFormReport:
    """Sign structure of the second variation on the constraint kernel."""
    if lmax < 2:
        raise ValueError("harmonic cutoff must be at least 2")
    labels, diag, constraints = _basis(eq, lmax)
    kernel = linalg.null_space(constraints)
    reduced = kernel.T @ (diag[:, None] * kernel)
    evals, evecs = linalg.eigh(0.5 * (reduced + reduced.T))
    positive = int(np.sum(evals > tol))
    null = np.abs(evals) <= tol
    report = QuadraticFormReport(
        classification="indefinite" if positive else "negSemiDefinite",
        eigenvalues=evals,
        positive_dimension=positive,
        null_dimension=int(np.sum(null)),
        null_vectors=kernel @ evecs[:, null],
        labels=labels,
        value=float(evals.max()),
    )
    if positive and eq.m >= 2:
        values = np.zeros(eq.m)
        values[:2] = (1.0, -1.0)
        witness = Perturbation.constant_h(values, eq.n, eq.radius, lmax)
        report.witness = witness
        report.witness_value = second_variation_form(eq, witness)
    return report
