"""Constitutive laws of the two bulk phases and of the interface.

Every temperature-dependent coefficient is one of a few closed-form
families whose derivatives are known analytically, so every derived
quantity (entropy, internal energy, heat capacity, latent heat, and
their surface analogues) can be checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Protocol

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import optimize

from .errors import ConfigError, MultipleZeros, NoZeroFound, TemperatureOutOfRange

TOL_ROOT = 1e-12


class ScalarLaw(Protocol):
    family: str

    def __call__(self, theta): ...

    def deriv(self, theta, order: int = 1): ...

    def params(self) -> dict: ...


@dataclass(frozen=True)
class Polynomial:
    """p(theta) = sum_k coeffs[k] * theta**k."""

    coeffs: tuple[float, ...]
    family: str = field(default="polynomial", init=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def __call__(self, theta):
        return P.polyval(theta, self.coeffs)

    def deriv(self, theta, order=1):
        if order >= len(self.coeffs):
            return np.zeros_like(np.asarray(theta, dtype=float)) + 0.0
        return P.polyval(theta, P.polyder(self.coeffs, order))

    def params(self):
        return {"coeffs": list(self.coeffs)}


def constant(value: float) -> Polynomial:
    return Polynomial((value,))


def affine(value0: float, slope: float) -> Polynomial:
    return Polynomial((value0, slope))


@dataclass(frozen=True)
class FreeEnergy:
    """psi(theta) = a - b theta - c theta (log theta - 1).

    The heat capacity -theta psi'' equals c for every temperature.
    """

    a: float
    b: float
    c: float
    family: str = field(default="free_energy", init=False)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.a - self.b * theta - self.c * theta * (np.log(theta) - 1.0)

    def deriv(self, theta, order=1):
        theta = np.asarray(theta, dtype=float)
        if order == 0:
            return self(theta)
        if order == 1:
            return -self.b - self.c * np.log(theta)
        # d^k/dtheta^k (-c log theta) for k >= 1
        k = order - 1
        sign = (-1.0) ** (k - 1)
        return -self.c * sign * _factorial(k - 1) / theta**k

    def params(self):
        return {"a": self.a, "b": self.b, "c": self.c}


@dataclass(frozen=True)
class QuadraticTension:
    """sigma(theta) = sigma0 (1 - theta^2 / theta_c^2)."""

    sigma0: float
    theta_c: float
    family: str = field(default="quadratic_tension", init=False)

    def _poly(self):
        return Polynomial((self.sigma0, 0.0, -self.sigma0 / self.theta_c**2))

    def __call__(self, theta):
        return self._poly()(theta)

    def deriv(self, theta, order=1):
        return self._poly().deriv(theta, order)

    def closed_form_zero(self) -> float:
        return float(self.theta_c)

    def params(self):
        return {"sigma0": self.sigma0, "theta_c": self.theta_c}


def _factorial(k: int) -> float:
    out = 1.0
    for i in range(2, k + 1):
        out *= i
    return out


_FAMILY_KEYS = {
    "constant": ("value",),
    "affine": ("value0", "slope"),
    "polynomial": ("coeffs",),
    "free_energy": ("a", "b", "c"),
    "quadratic_tension": ("sigma0", "theta_c"),
}


def law_from_spec(spec: dict) -> ScalarLaw:
    """Build a constitutive function from ``{"family": ..., **params}``; keys must match exactly."""
    spec = dict(spec)
    family = spec.pop("family", None)
    if family not in _FAMILY_KEYS:
        raise ConfigError(f"unknown constitutive family {family!r}")
    expected = set(_FAMILY_KEYS[family])
    if set(spec) != expected:
        raise ConfigError(f"family {family!r} takes parameters {sorted(expected)}, got {sorted(spec)}")
    if family == "constant":
        return constant(float(spec["value"]))
    if family == "affine":
        return affine(float(spec["value0"]), float(spec["slope"]))
    if family == "polynomial":
        return Polynomial(tuple(float(c) for c in spec["coeffs"]))
    if family == "free_energy":
        return FreeEnergy(float(spec["a"]), float(spec["b"]), float(spec["c"]))
    return QuadraticTension(float(spec["sigma0"]), float(spec["theta_c"]))


def law_to_spec(law: ScalarLaw) -> dict:
    if isinstance(law, Polynomial):
        if len(law.coeffs) == 1:
            return {"family": "constant", "value": law.coeffs[0]}
        if len(law.coeffs) == 2:
            return {"family": "affine", "value0": law.coeffs[0], "slope": law.coeffs[1]}
    return {"family": law.family, **law.params()}


class BulkQuantities(NamedTuple):
    eta: float
    eps: float
    kappa: float


class SurfaceQuantities(NamedTuple):
    eta: float
    eps: float
    kappa: float
    latent: float


@dataclass(frozen=True)
class PhaseLaw:
    rho: float
    psi: ScalarLaw
    mu: ScalarLaw
    d: ScalarLaw

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("density must be positive")

    def eta(self, theta):
        return -self.psi.deriv(theta, 1)

    def eps(self, theta):
        return self.psi(theta) - theta * self.psi.deriv(theta, 1)

    def kappa(self, theta):
        return -theta * self.psi.deriv(theta, 2)

    def dkappa(self, theta):
        return -self.psi.deriv(theta, 2) - theta * self.psi.deriv(theta, 3)


def critical_temperature(sigma: ScalarLaw, bracket=None, scan_points: int = 4096) -> float:
    """Unique zero of the surface tension on (0, infinity).

    Families with a known zero return it directly (after checking it is the
    only sign change). Otherwise sign changes are located on a dense scan of
    ``bracket`` (default (1e-9, 1e3)) and the single crossing is refined with
    Brent's method down to |sigma| < 1e-12.
    """
    lo, hi = bracket if bracket is not None else (1e-9, 1e3)
    closed = getattr(sigma, "closed_form_zero", None)
    if closed is not None:
        hi = max(hi, 2.0 * closed())
    grid = np.linspace(lo, hi, scan_points)
    vals = sigma(grid)
    changes = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    exact = np.nonzero(vals == 0.0)[0]
    n_changes = len(changes) + len(exact)
    if n_changes == 0:
        raise NoZeroFound("surface tension has no sign change on the scan interval")
    if n_changes > 1:
        raise MultipleZeros(f"surface tension changes sign {n_changes} times")
    if closed is not None:
        root = float(closed())
    elif len(exact):
        root = float(grid[exact[0]])
    else:
        i = changes[0]
        root = optimize.brentq(sigma, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if abs(sigma(root)) >= TOL_ROOT:
        raise NoZeroFound(f"root refinement stalled: |sigma(theta_c)| = {abs(sigma(root)):.3e}")
    return root


@dataclass(frozen=True)
class SurfaceLaw:
    sigma: ScalarLaw
    d_gamma: ScalarLaw
    gamma: ScalarLaw
    theta_c: float = None
    bracket: tuple[float, float] | None = None

    def __post_init__(self):
        if self.theta_c is None:
            object.__setattr__(self, "theta_c", critical_temperature(self.sigma, self.bracket))

    def eta(self, theta):
        return -self.sigma.deriv(theta, 1)

    def eps(self, theta):
        return self.sigma(theta) - theta * self.sigma.deriv(theta, 1)

    def kappa(self, theta):
        return -theta * self.sigma.deriv(theta, 2)

    def dkappa(self, theta):
        return -self.sigma.deriv(theta, 2) - theta * self.sigma.deriv(theta, 3)

    def latent(self, theta):
        return theta * self.sigma.deriv(theta, 1)


@dataclass(frozen=True)
class MaterialSet:
    phase1: PhaseLaw
    phase2: PhaseLaw
    surface: SurfaceLaw

    @property
    def theta_c(self) -> float:
        return self.surface.theta_c

    @property
    def phases(self) -> tuple[PhaseLaw, PhaseLaw]:
        return (self.phase1, self.phase2)

    def jump(self, f):
        """[[f]] = f(phase2) - f(phase1) for a callable of a PhaseLaw."""
        return f(self.phase2) - f(self.phase1)

    def swapped(self) -> MaterialSet:
        return MaterialSet(self.phase2, self.phase1, self.surface)


def _check_range(theta, theta_c):
    t = np.asarray(theta, dtype=float)
    if np.any(~(t > 0)) or np.any(~(t < theta_c)):
        raise TemperatureOutOfRange(f"temperature {theta} outside (0, {theta_c})")


def derived_bulk(phase: PhaseLaw, theta, theta_c: float = np.inf) -> BulkQuantities:
    _check_range(theta, theta_c)
    return BulkQuantities(phase.eta(theta), phase.eps(theta), phase.kappa(theta))


def latent_heat(ms: MaterialSet, theta):
    """l(theta) = theta [[psi'(theta)]]."""
    _check_range(theta, ms.theta_c)
    return theta * ms.jump(lambda p: p.psi.deriv(theta, 1))


def derived_surface(s: SurfaceLaw, theta) -> SurfaceQuantities:
    _check_range(theta, s.theta_c)
    return SurfaceQuantities(s.eta(theta), s.eps(theta), s.kappa(theta), s.latent(theta))


@dataclass(frozen=True)
class Violation:
    code: str
    theta: float | None
    value: float


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def to_dict(self):
        return {
            "ok": self.ok,
            "violations": [
                {"code": v.code, "theta": v.theta, "value": float(v.value)} for v in self.violations
            ],
        }


def default_grid(theta_c: float, points: int = 257) -> np.ndarray:
    return np.linspace(0.01 * theta_c, 0.99 * theta_c, points)


def validate_assumptions(ms: MaterialSet, grid=None) -> ValidationReport:
    """List every violated standing hypothesis on a temperature grid.

    Checked: positive heat capacities, viscosities and conductivities in both
    phases, sigma > 0 with sigma' < 0 and sigma'' < 0, positive surface heat
    capacity and surface conductivity, nonnegative kinetic coefficient, and
    unequal densities.
    """
    theta = default_grid(ms.theta_c) if grid is None else np.asarray(grid, dtype=float)
    report = ValidationReport()
    if ms.phase1.rho == ms.phase2.rho:
        report.violations.append(Violation("EqualDensities", None, 0.0))

    def scan(code, values, bad):
        values = np.broadcast_to(np.asarray(values, dtype=float), theta.shape)
        for t, v in zip(theta, values):
            if bad(v):
                report.violations.append(Violation(code, float(t), float(v)))

    for i, ph in enumerate(ms.phases, start=1):
        scan(f"NonPositiveHeatCapacity{i}", ph.kappa(theta), lambda v: not v > 0)
        scan(f"NonPositiveViscosity{i}", ph.mu(theta), lambda v: not v > 0)
        scan(f"NonPositiveConductivity{i}", ph.d(theta), lambda v: not v > 0)
    s = ms.surface
    scan("NonPositiveSurfaceTension", s.sigma(theta), lambda v: not v > 0)
    scan("NonDecreasingSurfaceTension", s.sigma.deriv(theta, 1), lambda v: not v < 0)
    scan("NonConcaveSurfaceTension", s.sigma.deriv(theta, 2), lambda v: not v < 0)
    scan("NonPositiveSurfaceHeatCapacity", s.kappa(theta), lambda v: not v > 0)
    scan("NonPositiveSurfaceConductivity", s.d_gamma(theta), lambda v: not v > 0)
    scan("NegativeKineticCoefficient", s.gamma(theta), lambda v: not v >= 0)
    return report


def default_materials(gamma: float = 0.1) -> MaterialSet:
    """rho = (2, 1), heat capacities (2, 1), sigma0 = 1, theta_c = 2, unit transport.

    b = (1, 0.5) makes the latent heat at theta = 1 equal to 0.5.
    """
    one = constant(1.0)
    p1 = PhaseLaw(2.0, FreeEnergy(0.0, 1.0, 2.0), one, one)
    p2 = PhaseLaw(1.0, FreeEnergy(0.0, 0.5, 1.0), one, one)
    surf = SurfaceLaw(QuadraticTension(1.0, 2.0), one, constant(gamma))
    return MaterialSet(p1, p2, surf)


def _exact_keys(section: dict, keys: set, where: str) -> dict:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping")
    if set(section) != keys:
        missing, extra = keys - set(section), set(section) - keys
        raise ConfigError(f"{where}: missing {sorted(missing)}, unknown {sorted(extra)}")
    return section


def materials_from_spec(spec: dict) -> MaterialSet:
    _exact_keys(spec, {"phase1", "phase2", "surface"}, "materials")

    def phase(name):
        p = _exact_keys(spec[name], {"rho", "psi", "mu", "d"}, f"materials.{name}")
        return PhaseLaw(float(p["rho"]), law_from_spec(p["psi"]), law_from_spec(p["mu"]), law_from_spec(p["d"]))

    s = _exact_keys(spec["surface"], {"sigma", "d_gamma", "gamma"}, "materials.surface")
    surface = SurfaceLaw(law_from_spec(s["sigma"]), law_from_spec(s["d_gamma"]), law_from_spec(s["gamma"]))
    return MaterialSet(phase("phase1"), phase("phase2"), surface)


def materials_to_spec(ms: MaterialSet) -> dict:
    def phase(p):
        return {
            "rho": p.rho,
            "psi": law_to_spec(p.psi),
            "mu": law_to_spec(p.mu),
            "d": law_to_spec(p.d),
        }

    s = ms.surface
    return {
        "phase1": phase(ms.phase1),
        "phase2": phase(ms.phase2),
        "surface": {
            "sigma": law_to_spec(s.sigma),
            "d_gamma": law_to_spec(s.d_gamma),
            "gamma": law_to_spec(s.gamma),
        },
    }
