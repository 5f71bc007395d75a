"""Material and geometric constants of the problem linearized at an equilibrium."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..equilibria import EquilibriumState
from ..geometry import mean_curvature
from ..harmonics import laplace_beltrami_symbol, surface_operator_eig
from ..thermo import latent_heat


@dataclass(frozen=True)
class Linearization:
    """Frozen coefficients for one sphere of radius R concentric in a ball of radius R_outer."""

    n: int
    R: float
    R_outer: float
    theta: float
    rho: tuple[float, float]
    mu: tuple[float, float]
    d: tuple[float, float]
    kappa: tuple[float, float]
    sigma: float
    dsigma: float
    kappa_gamma: float
    d_gamma: float
    gamma: float
    latent: float

    @classmethod
    def from_equilibrium(cls, eq: EquilibriumState) -> Linearization:
        ms, th = eq.materials, eq.theta_star
        ph = ms.phases
        s = ms.surface
        return cls(
            n=eq.n,
            R=eq.radius,
            R_outer=eq.domain.radius,
            theta=th,
            rho=tuple(p.rho for p in ph),
            mu=tuple(float(p.mu(th)) for p in ph),
            d=tuple(float(p.d(th)) for p in ph),
            kappa=tuple(float(p.kappa(th)) for p in ph),
            sigma=float(s.sigma(th)),
            dsigma=float(s.sigma.deriv(th, 1)),
            kappa_gamma=float(s.kappa(th)),
            d_gamma=float(s.d_gamma(th)),
            gamma=float(s.gamma(th)),
            latent=float(latent_heat(ms, th)),
        )

    def with_(self, **changes) -> Linearization:
        return replace(self, **changes)

    @property
    def H(self) -> float:
        return mean_curvature(self.n, self.R)

    @property
    def jump_rho(self) -> float:
        return self.rho[1] - self.rho[0]

    @property
    def jump_inv_rho(self) -> float:
        return 1.0 / self.rho[1] - 1.0 / self.rho[0]

    def symbol(self, l: int) -> int:
        return laplace_beltrami_symbol(self.n, l)

    def a(self, l: int) -> float:
        return surface_operator_eig(self.n, l, self.R)
