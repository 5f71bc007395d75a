import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twophase.errors import ConfigError, MultipleZeros, NoZeroFound, TemperatureOutOfRange
from twophase.thermo import (
    FreeEnergy,
    MaterialSet,
    PhaseLaw,
    Polynomial,
    QuadraticTension,
    SurfaceLaw,
    affine,
    constant,
    critical_temperature,
    default_materials,
    derived_bulk,
    derived_surface,
    latent_heat,
    law_from_spec,
    law_to_spec,
    materials_from_spec,
    materials_to_spec,
    validate_assumptions,
)

ONE = constant(1.0)
coef = st.floats(-3.0, 3.0)
positive = st.floats(0.1, 5.0)
unit = st.floats(0.01, 0.99)


def central(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def phase(a, b, c, rho=1.0):
    return PhaseLaw(rho, FreeEnergy(a, b, c), ONE, ONE)


def surface(sigma0, theta_c):
    return SurfaceLaw(QuadraticTension(sigma0, theta_c), ONE, constant(0.1))


# -- bulk ------------------------------------------------------------------


def test_bulk_free_energy_example():
    q = derived_bulk(phase(0.0, 0.0, 2.0), 1.0)
    assert q.eta == pytest.approx(0.0, abs=1e-15)
    assert q.eps == pytest.approx(2.0, abs=1e-15)
    assert q.kappa == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("theta", [0.0, -1.0, 2.0, 3.0])
def test_bulk_out_of_range(theta):
    with pytest.raises(TemperatureOutOfRange):
        derived_bulk(phase(0, 1, 2), theta, theta_c=2.0)


@given(coef, coef, positive, unit)
def test_bulk_identities(a, b, c, frac):
    theta_c = 2.0
    theta = frac * theta_c
    ph = phase(a, b, c)
    q = derived_bulk(ph, theta, theta_c)
    psi = ph.psi(theta)
    assert abs(q.eps - psi - theta * q.eta) < 1e-12 * (1 + abs(q.eps))
    assert abs(q.kappa + theta * ph.psi.deriv(theta, 2)) < 1e-10
    assert q.kappa > 0


@given(coef, coef, positive, unit)
def test_bulk_derivatives_match_finite_differences(a, b, c, frac):
    theta = frac * 2.0
    psi = FreeEnergy(a, b, c)
    h = 1e-4 * theta
    for order in (1, 2, 3):
        fd = central(lambda t: psi.deriv(t, order - 1), theta, h)
        exact = psi.deriv(theta, order)
        assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


@given(st.lists(coef, min_size=1, max_size=5), st.floats(0.1, 2.0))
def test_polynomial_derivatives(coeffs, theta):
    p = Polynomial(tuple(coeffs))
    h = 1e-5
    for order in (1, 2, 3):
        fd = central(lambda t: p.deriv(t, order - 1), theta, h)
        assert abs(fd - p.deriv(theta, order)) <= 1e-6 * max(1.0, abs(fd))


def test_polynomial_high_order_derivative_is_zero():
    assert affine(1.0, 2.0).deriv(0.5, 2) == 0.0
    np.testing.assert_array_equal(constant(3.0).deriv(np.array([0.1, 0.2]), 1), 0.0)


# -- latent heat -----------------------------------------------------------


def _two_phase(psi1, psi2, rho=(2.0, 1.0)):
    return MaterialSet(
        PhaseLaw(rho[0], psi1, ONE, ONE), PhaseLaw(rho[1], psi2, ONE, ONE), surface(1.0, 5.0)
    )


def test_latent_heat_identical_phases_is_zero():
    psi = FreeEnergy(0.3, 0.7, 1.1)
    assert latent_heat(_two_phase(psi, psi), 1.3) == 0.0


def test_latent_heat_example():
    ms = _two_phase(FreeEnergy(0, 0, 1), FreeEnergy(0, 0, 2))
    assert latent_heat(ms, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert latent_heat(ms, math.e) == pytest.approx(-math.e, rel=1e-14)


@given(coef, coef, positive, coef, coef, positive, st.floats(0.01, 4.9))
def test_latent_heat_consistency_and_antisymmetry(a1, b1, c1, a2, b2, c2, theta):
    ms = _two_phase(FreeEnergy(a1, b1, c1), FreeEnergy(a2, b2, c2))
    l = latent_heat(ms, theta)
    jump_eta = ms.phase2.eta(theta) - ms.phase1.eta(theta)
    assert abs(l + theta * jump_eta) < 1e-12 * (1 + abs(l))
    assert latent_heat(ms.swapped(), theta) == -l


def test_latent_heat_out_of_range(ms):
    with pytest.raises(TemperatureOutOfRange):
        latent_heat(ms, ms.theta_c)


def test_default_latent_heat_nonzero(ms):
    assert latent_heat(ms, 1.0) == pytest.approx(0.5)


# -- surface ---------------------------------------------------------------


def test_surface_example():
    q = derived_surface(surface(1.0, 2.0), 1.0)
    assert q.eta == pytest.approx(0.5)
    assert q.eps == pytest.approx(1.25)
    assert q.kappa == pytest.approx(0.5)
    assert q.latent == pytest.approx(-0.5)


def test_surface_small_temperature_limit():
    q = derived_surface(surface(1.5, 2.0), 1e-8)
    assert q.eta == pytest.approx(0.0, abs=1e-7)
    assert q.eps == pytest.approx(1.5, rel=1e-12)


@given(positive, positive, unit)
def test_surface_identities(sigma0, theta_c, frac):
    s = surface(sigma0, theta_c)
    theta = frac * theta_c
    q = derived_surface(s, theta)
    assert abs(q.eps - s.sigma(theta) - theta * q.eta) < 1e-12 * (1 + abs(q.eps))
    assert abs(q.latent - theta * s.sigma.deriv(theta)) < 1e-12 * (1 + abs(q.latent))
    assert abs(q.kappa + theta * s.sigma.deriv(theta, 2)) < 1e-12 * (1 + abs(q.kappa))
    assert q.kappa > 0


def test_surface_out_of_range():
    with pytest.raises(TemperatureOutOfRange):
        derived_surface(surface(1.0, 2.0), 2.0)


# -- critical temperature --------------------------------------------------


@given(positive, positive)
def test_critical_temperature_closed_form(sigma0, theta_c):
    assert critical_temperature(QuadraticTension(sigma0, theta_c)) == pytest.approx(theta_c, abs=1e-12)


def test_critical_temperature_no_zero():
    with pytest.raises(NoZeroFound):
        critical_temperature(Polynomial((1.0, 0.0, 1.0)))


def test_critical_temperature_multiple_zeros():
    # (theta - 1)(theta - 3) changes sign twice
    with pytest.raises(MultipleZeros):
        critical_temperature(Polynomial((3.0, -4.0, 1.0)))


@given(st.floats(0.5, 3.0), st.floats(0.0, 2.0), st.floats(0.05, 2.0))
def test_critical_temperature_matches_grid_scan(s0, s1, s2):
    # sigma = s0 - s1 theta - s2 theta^2 is concave, decreasing, one positive zero
    sigma = Polynomial((s0, -s1, -s2))
    root = critical_temperature(sigma, bracket=(1e-6, 10.0))
    grid = np.linspace(1e-6, 10.0, 200001)
    vals = sigma(grid)
    i = np.nonzero(vals[:-1] * vals[1:] < 0)[0][0]
    assert grid[i] <= root <= grid[i + 1]
    assert abs(sigma(root)) < 1e-12
    exact = (-s1 + math.sqrt(s1 * s1 + 4 * s0 * s2)) / (2 * s2)
    assert root == pytest.approx(exact, rel=1e-12)


# -- validation ------------------------------------------------------------


def test_default_materials_valid(ms):
    assert validate_assumptions(ms).ok


def test_equal_densities_flagged(ms):
    bad = MaterialSet(ms.phase1, PhaseLaw(ms.phase1.rho, ms.phase2.psi, ONE, ONE), ms.surface)
    assert "EqualDensities" in validate_assumptions(bad).codes()


def test_negative_kinetic_coefficient_flagged(ms):
    s = SurfaceLaw(ms.surface.sigma, ONE, constant(-1.0))
    assert "NegativeKineticCoefficient" in validate_assumptions(MaterialSet(ms.phase1, ms.phase2, s)).codes()


def test_linear_tension_flagged(ms):
    s = SurfaceLaw(affine(1.0, -0.5), ONE, constant(0.1))
    report = validate_assumptions(MaterialSet(ms.phase1, ms.phase2, s))
    assert "NonConcaveSurfaceTension" in report.codes()
    assert "NonPositiveSurfaceHeatCapacity" in report.codes()


def test_violation_entries_carry_temperature(ms):
    bad = MaterialSet(PhaseLaw(2.0, ms.phase1.psi, affine(0.5, -1.0), ONE), ms.phase2, ms.surface)
    report = validate_assumptions(bad, grid=[0.1, 0.4, 0.6, 1.0])
    thetas = [v.theta for v in report.violations if v.code == "NonPositiveViscosity1"]
    assert thetas == [0.6, 1.0]
    assert report.to_dict()["ok"] is False


# -- specs -----------------------------------------------------------------


@pytest.mark.parametrize(
    "spec",
    [
        {"family": "constant", "value": 2.0},
        {"family": "affine", "value0": 1.0, "slope": -0.5},
        {"family": "polynomial", "coeffs": [1.0, 0.0, 2.0, 3.0]},
        {"family": "free_energy", "a": 0.1, "b": 0.2, "c": 0.3},
        {"family": "quadratic_tension", "sigma0": 1.0, "theta_c": 2.0},
    ],
)
def test_law_spec_round_trip(spec):
    law = law_from_spec(spec)
    assert law_to_spec(law) == spec
    assert law(0.7) == law_from_spec(law_to_spec(law))(0.7)


@pytest.mark.parametrize(
    "spec",
    [
        {"family": "cubic", "a": 1},
        {"family": "constant"},
        {"family": "constant", "value": 1.0, "slope": 2.0},
        {"value": 1.0},
    ],
)
def test_law_spec_rejects(spec):
    with pytest.raises(ConfigError):
        law_from_spec(spec)


def test_materials_spec_round_trip(ms):
    spec = materials_to_spec(ms)
    again = materials_from_spec(spec)
    assert materials_to_spec(again) == spec
    assert again.theta_c == ms.theta_c


def test_materials_spec_rejects_unknown_key(ms):
    spec = materials_to_spec(ms)
    spec["phase1"]["colour"] = "red"
    with pytest.raises(ConfigError):
        materials_from_spec(spec)


def test_default_materials_gamma():
    assert default_materials(0.0).surface.gamma(1.0) == 0.0
