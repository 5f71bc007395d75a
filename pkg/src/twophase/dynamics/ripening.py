"""Quasi-static volume exchange between m droplets of phase 1.

Reduction used here: temperature is uniform outside the droplets and
relaxes instantly, and each droplet obeys a linear kinetic law

    gamma rho1 dR_k/dt = g - sigma (n-1) / (rho1 R_k),

where g is a common far-field drive fixed by conservation of the total
phase-1 volume. Solving for g gives

    dR_k/dt = c (A - 1/R_k),   c = sigma (n-1) / (gamma rho1^2),
    A = sum R^(n-2) / sum R^(n-1).

Larger droplets grow, smaller ones shrink, and the total area sum R^(n-1)
never increases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import DropletCollapse, GammaZero, StepFailure
from ..spectral.coefficients import Linearization
from ..thermo import MaterialSet, latent_heat

R_MIN_FRACTION = 1e-3


@dataclass(frozen=True)
class RipeningParams:
    n: int
    sigma: float
    gamma: float
    rho1: float
    theta: float
    latent: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise GammaZero("kinetic coefficient must be positive for the ripening reduction")

    @classmethod
    def from_linearization(cls, lin: Linearization) -> RipeningParams:
        return cls(lin.n, lin.sigma, lin.gamma, lin.rho[0], lin.theta, lin.latent)

    @classmethod
    def from_materials(cls, ms: MaterialSet, n: int, theta: float) -> RipeningParams:
        s = ms.surface
        return cls(n, float(s.sigma(theta)), float(s.gamma(theta)), ms.phase1.rho, theta, float(latent_heat(ms, theta)))

    @property
    def rate_constant(self) -> float:
        return self.sigma * (self.n - 1) / (self.gamma * self.rho1**2)


@dataclass(frozen=True)
class DropletState:
    t: float
    radii: np.ndarray
    theta_bar: float


def _mean_inverse(n, radii):
    return np.sum(radii ** (n - 2)) / np.sum(radii ** (n - 1))


def ripening_rhs(params: RipeningParams, radii, r_min: float = 0.0) -> np.ndarray:
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= r_min):
        raise DropletCollapse(f"droplet radius below {r_min:.3g}: {radii.min():.3g}")
    return params.rate_constant * (_mean_inverse(params.n, radii) - 1.0 / radii)


def far_field_temperature(params: RipeningParams, radii, reference_radius: float) -> float:
    """Temperature whose undercooling produces the common drive g."""
    A = _mean_inverse(params.n, np.asarray(radii, dtype=float))
    return params.theta - params.theta * params.sigma * (params.n - 1) / params.latent * (A - 1.0 / reference_radius)


def ripening_jacobian(params: RipeningParams, radii) -> np.ndarray:
    radii = np.asarray(radii, dtype=float)
    n = params.n
    s1 = np.sum(radii ** (n - 1))
    s2 = np.sum(radii ** (n - 2))
    dA = ((n - 2) * radii ** (n - 3) * s1 - (n - 1) * radii ** (n - 2) * s2) / s1**2
    return params.rate_constant * (dA[None, :] + np.diag(1.0 / radii**2))


@dataclass
class RipeningTrajectory:
    t: np.ndarray
    radii: np.ndarray  # (steps, m) with NaN after extinction
    events: list[dict] = field(default_factory=list)
    theta_bar: np.ndarray | None = None

    @property
    def final_radii(self) -> np.ndarray:
        last = self.radii[-1]
        return last[np.isfinite(last)]


def simulate_ripening(
    params: RipeningParams,
    initial,
    T: float,
    dt: float,
    r_min: float | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-13,
) -> RipeningTrajectory:
    """Integrate in volume variables v = R^n, removing droplets that reach r_min.

    The volume of a removed droplet is handed to the survivors in proportion
    to their volumes, so sum R^n is unchanged by events. Output is sampled
    every dt.
    """
    n = params.n
    radii = np.asarray(initial, dtype=float).copy()
    m = len(radii)
    r_ref = float(np.mean(radii))
    r_min = R_MIN_FRACTION * r_ref if r_min is None else r_min
    floor = 1e-6 * r_min**n
    alive = np.ones(m, dtype=bool)
    t0 = 0.0
    times = [0.0]
    samples = [radii.copy()]
    events = []
    grid = np.arange(0.0, T + 0.5 * dt, dt)[1:]

    while t0 < T:
        idx = np.flatnonzero(alive)
        if len(idx) <= 1:
            break

        def rhs(_, v):
            r = np.maximum(v, floor) ** (1.0 / n)
            rates = params.rate_constant * (_mean_inverse(n, r) - 1.0 / r)
            return n * r ** (n - 1) * rates

        def hit(_, v, k=None):
            return np.min(v) - r_min**n

        hit.terminal = True
        hit.direction = -1
        sol = solve_ivp(
            rhs, (t0, T), radii[idx] ** n, method="RK45", dense_output=True,
            events=hit, rtol=rtol, atol=atol * np.sum(radii[idx] ** n),
        )
        if sol.status < 0:
            raise StepFailure(f"ripening integration failed: {sol.message}")
        t_end = float(sol.t[-1])
        pending = grid[(grid > t0) & (grid < t_end)]
        for t in pending:
            row = np.full(m, np.nan)
            row[idx] = np.maximum(sol.sol(t), 0.0) ** (1.0 / n)
            times.append(float(t))
            samples.append(row)
        v = sol.y[:, -1].copy()
        if sol.status == 1:
            v = sol.y_events[0][0].copy()
            dead = int(np.argmin(v))
            removed = v[dead]
            survivors = np.arange(len(v)) != dead
            v[survivors] += removed * v[survivors] / np.sum(v[survivors])
            v[dead] = np.nan
            alive[idx[dead]] = False
            events.append({"t": t_end, "droplet": int(idx[dead]), "volume": float(removed)})
        radii[idx] = v ** (1.0 / n)
        times.append(t_end)
        samples.append(radii.copy())
        t0 = t_end
    if times[-1] < T:
        # at most one droplet left: the state is stationary
        times.append(float(T))
        samples.append(radii.copy())
    traj = RipeningTrajectory(np.array(times), np.array(samples), events)
    traj.theta_bar = np.array([
        far_field_temperature(params, row[np.isfinite(row)], r_ref) for row in traj.radii
    ])
    return traj
