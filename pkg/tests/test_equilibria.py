import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twophase import geometry
from twophase.equilibria import (
    Domain,
    NonMonotoneWarning,
    RadialField,
    SphereFamily,
    build_equilibrium,
    default_centers,
    equilibrium_energy,
    equilibrium_pressures,
    free_parameters,
    radius_from_mass,
    temperature_from_energy,
    total_functionals,
    total_mass,
    validate_nondegenerate,
)
from twophase.errors import (
    DegenerateConfiguration,
    EmptyPhase,
    NoRootInRange,
    QuadratureFailure,
    TemperatureOutOfRange,
)
from twophase.thermo import (
    FreeEnergy,
    MaterialSet,
    PhaseLaw,
    Polynomial,
    QuadraticTension,
    SurfaceLaw,
    constant,
)

ONE = constant(1.0)


def materials(rho1=2.0, rho2=1.0, sigma=None):
    sigma = sigma or QuadraticTension(1.0, 2.0)
    return MaterialSet(
        PhaseLaw(rho1, FreeEnergy(0.0, 1.0, 2.0), ONE, ONE),
        PhaseLaw(rho2, FreeEnergy(0.0, 0.5, 1.0), ONE, ONE),
        SurfaceLaw(sigma, ONE, constant(0.1)),
    )


# -- radius from mass ------------------------------------------------------


def test_radius_from_mass_ball_example(ms):
    dom = Domain(3, 2.0)
    R = radius_from_mass(dom, ms, 12 * math.pi, 1)
    assert R == pytest.approx(1.0, rel=1e-14)
    spheres = SphereFamily(np.zeros((1, 3)), R)
    assert total_mass(ms, dom, spheres) == pytest.approx(12 * math.pi, rel=1e-12)


def test_radius_from_mass_disk_example(ms):
    R = radius_from_mass(Domain(2, 1.0), ms, math.pi + 2 * math.pi / 8, 2)
    assert R == pytest.approx(math.sqrt(1 / 8), rel=1e-14)


def test_radius_from_mass_empty_phase(ms):
    dom = Domain(3, 2.0)
    with pytest.raises(EmptyPhase):
        radius_from_mass(dom, ms, ms.phase2.rho * dom.volume, 1)
    with pytest.raises(EmptyPhase):
        radius_from_mass(dom, ms, ms.phase1.rho * dom.volume, 1)


@given(
    st.floats(0.3, 5.0),
    st.floats(0.3, 5.0),
    st.floats(0.05, 0.95),
    st.integers(1, 4),
    st.sampled_from([2, 3]),
)
def test_mass_round_trip(rho1, rho2, frac, m, n):
    if abs(rho1 - rho2) < 1e-3:
        rho2 = rho1 + 0.5
    ms = materials(rho1, rho2)
    dom = Domain(n, 1.7)
    M0 = rho2 * dom.volume + frac * (rho1 - rho2) * dom.volume
    R = radius_from_mass(dom, ms, M0, m)
    spheres = SphereFamily(np.zeros((m, n)), R)
    assert total_mass(ms, dom, spheres) == pytest.approx(M0, rel=1e-12)


def test_spheres_filling_container_rejected(ms):
    dom = Domain(3, 2.0)
    M0 = ms.phase2.rho * dom.volume + 0.99 * dom.volume
    with pytest.raises(DegenerateConfiguration):
        build_equilibrium(ms, dom, 3, mass=M0, theta=1.0)


# -- temperature from energy -----------------------------------------------


def test_energy_closed_form(ms):
    dom = Domain(3, 2.0)
    spheres = SphereFamily(np.zeros((1, 3)), 1.0)
    for th in (0.3, 1.0, 1.7):
        closed = (4 * 4 * math.pi / 3 + 28 * math.pi / 3) * th + 4 * math.pi * (1 + th * th / 4)
        assert equilibrium_energy(ms, dom, spheres, th) == pytest.approx(closed, rel=1e-14)


def test_temperature_from_energy_example(ms):
    dom = Domain(3, 2.0)
    spheres = SphereFamily(np.zeros((1, 3)), 1.0)
    E0 = float(equilibrium_energy(ms, dom, spheres, 1.0))
    assert temperature_from_energy(ms, dom, spheres, E0) == pytest.approx(1.0, abs=1e-10)


def test_temperature_from_energy_below_range(ms):
    dom = Domain(3, 2.0)
    spheres = SphereFamily(np.zeros((1, 3)), 1.0)
    lowest = float(equilibrium_energy(ms, dom, spheres, 1e-9))
    with pytest.raises(NoRootInRange):
        temperature_from_energy(ms, dom, spheres, lowest - 1.0)


def test_temperature_small_interface_limit(ms):
    dom = Domain(3, 2.0)
    th = 1.3
    # bulk-only closed form with all of the container filled by phase 2
    c2 = ms.phase2.rho * 1.0
    E0 = c2 * th * dom.volume
    spheres = SphereFamily(np.zeros((1, 3)), 1e-6)
    got = temperature_from_energy(ms, dom, spheres, E0)
    assert got == pytest.approx(th, rel=1e-6)


def test_non_monotone_energy_warns():
    # a convex tension makes the surface energy decrease with temperature, so a
    # small bulk heat capacity and a large interface give a non-monotone E
    theta_c = 2 - math.sqrt(2)
    ms = MaterialSet(
        PhaseLaw(2.0, FreeEnergy(0.0, 0.0, 0.01), ONE, ONE),
        PhaseLaw(1.0, FreeEnergy(0.0, 0.0, 0.01), ONE, ONE),
        SurfaceLaw(Polynomial((1.0, -2.0, 0.5)), ONE, constant(0.1), theta_c=theta_c),
    )
    dom = Domain(3, 1.0)
    spheres = SphereFamily(np.zeros((1, 3)), 0.9)
    thetas = np.linspace(1e-3, theta_c * 0.999, 400)
    E = np.array([float(equilibrium_energy(ms, dom, spheres, t)) for t in thetas])
    assert np.any(np.diff(E) > 0) and np.any(np.diff(E) < 0)
    E0 = 0.5 * (E.max() + max(E[0], E[-1]))
    with pytest.warns(NonMonotoneWarning):
        root = temperature_from_energy(ms, dom, spheres, E0)
    assert float(equilibrium_energy(ms, dom, spheres, root)) == pytest.approx(E0, rel=1e-10)
    assert root < thetas[np.argmax(E)]


@given(st.floats(0.05, 1.95), st.floats(0.2, 1.2), st.sampled_from([2, 3]), st.integers(1, 2))
def test_temperature_round_trip(theta, R, n, m):
    ms = materials()
    dom = Domain(n, 3.0)
    spheres = SphereFamily(default_centers(n, m, R, dom.radius), R)
    E0 = total_functionals(ms, dom, spheres, theta).energy
    assert temperature_from_energy(ms, dom, spheres, E0) == pytest.approx(theta, abs=1e-10)


# -- pressures -------------------------------------------------------------


def _check_pressures(ms, th, R, n, pi1, pi2):
    s = float(ms.surface.sigma(th)) * (n - 1) / R
    jump_psi = float(ms.phase2.psi(th) - ms.phase1.psi(th))
    assert abs(pi2 - pi1 - s) <= 1e-12 * max(1.0, abs(s), abs(pi1))
    gt = jump_psi + pi2 / ms.phase2.rho - pi1 / ms.phase1.rho
    assert abs(gt) <= 1e-12 * max(1.0, abs(jump_psi), abs(pi1))


def test_pressures_default(ms):
    pi1, pi2 = equilibrium_pressures(ms, 1.0, 1.0, 3)
    _check_pressures(ms, 1.0, 1.0, 3, pi1, pi2)


def test_pressures_zero_psi_jump():
    psi = FreeEnergy(0.0, 0.5, 1.0)
    ms = MaterialSet(
        PhaseLaw(2.0, psi, ONE, ONE), PhaseLaw(1.0, psi, ONE, ONE), SurfaceLaw(QuadraticTension(1.0, 2.0), ONE, ONE)
    )
    pi1, pi2 = equilibrium_pressures(ms, 1.0, 1.0, 3)
    s = 0.75 * 2
    assert pi2 - pi1 == pytest.approx(s, rel=1e-14)
    assert pi2 == pytest.approx(pi1 / 2, rel=1e-14)


def test_pressures_vanish_near_critical_temperature():
    psi = FreeEnergy(0.0, 0.5, 1.0)
    ms = MaterialSet(
        PhaseLaw(2.0, psi, ONE, ONE), PhaseLaw(1.0, psi, ONE, ONE), SurfaceLaw(QuadraticTension(1.0, 2.0), ONE, ONE)
    )
    pi1, pi2 = equilibrium_pressures(ms, 2.0 * (1 - 1e-14), 1.0, 3)
    assert abs(pi1) < 1e-12 and abs(pi2) < 1e-12


def test_pressures_out_of_range(ms):
    with pytest.raises(TemperatureOutOfRange):
        equilibrium_pressures(ms, 2.0, 1.0, 3)


@given(st.floats(0.05, 1.95), st.floats(0.1, 3.0), st.sampled_from([2, 3]))
def test_pressures_satisfy_both_relations(theta, R, n):
    ms = materials()
    pi1, pi2 = equilibrium_pressures(ms, theta, R, n)
    _check_pressures(ms, theta, R, n, pi1, pi2)


# -- geometry checks -------------------------------------------------------


def test_single_centered_ball_nondegenerate():
    assert validate_nondegenerate(SphereFamily(np.zeros((1, 3)), 1.0), Domain(3, 2.0)).ok


def test_touching_balls_degenerate():
    d = validate_nondegenerate(SphereFamily([[-1.0, 0.0], [1.0, 0.0]], 1.0), Domain(2, 5.0))
    assert not d.ok
    assert "balls 0 and 1" in d.messages[0]


def test_ball_touching_wall_degenerate():
    d = validate_nondegenerate(SphereFamily([[1.0, 0.0, 0.0]], 1.0), Domain(3, 2.0))
    assert not d.ok


@given(st.lists(st.tuples(st.floats(-2, 2), st.floats(-2, 2)), min_size=1, max_size=5), st.floats(0.1, 1.0), st.randoms())
def test_nondegeneracy_permutation_invariant(points, R, rnd):
    dom = Domain(2, 3.0)
    pts = np.array(points)
    brute = all(np.linalg.norm(p) + R < 3.0 for p in pts) and all(
        np.linalg.norm(pts[i] - pts[j]) > 2 * R for i in range(len(pts)) for j in range(i)
    )
    perm = list(range(len(pts)))
    rnd.shuffle(perm)
    assert validate_nondegenerate(SphereFamily(pts, R), dom).ok == brute
    assert validate_nondegenerate(SphereFamily(pts[perm], R), dom).ok == brute


def test_default_centers_fit():
    c = default_centers(3, 3, 0.4, 2.0)
    assert validate_nondegenerate(SphereFamily(c, 0.4), Domain(3, 2.0)).ok
    with pytest.raises(DegenerateConfiguration):
        default_centers(3, 4, 0.9, 2.0)


def test_free_parameters():
    assert free_parameters(3, 1) == 5
    assert free_parameters(2, 3) == 8


# -- totals ----------------------------------------------------------------


def test_equilibrium_totals(ms, eq3):
    t = total_functionals(ms, eq3.domain, eq3.spheres, 1.0)
    assert t.mass == pytest.approx(12 * math.pi, rel=1e-12)
    assert t.energy == pytest.approx(float(equilibrium_energy(ms, eq3.domain, eq3.spheres, 1.0)), rel=1e-12)
    assert t.entropy == pytest.approx(t.bulk_entropy + t.surface_entropy, rel=1e-14)


def test_constant_tension_has_no_surface_entropy():
    ms = materials()
    ms = MaterialSet(ms.phase1, ms.phase2, SurfaceLaw(constant(1.0), ONE, ONE, theta_c=10.0))
    dom = Domain(3, 2.0)
    spheres = SphereFamily(np.zeros((1, 3)), 1.0)
    t = total_functionals(ms, dom, spheres, 1.2)
    assert t.surface_entropy == 0.0
    bulk = t.energy - geometry.sphere_area(3, 1.0)
    assert bulk == pytest.approx(
        ms.phase1.rho * ms.phase1.eps(1.2) * 4 * math.pi / 3 + ms.phase2.rho * ms.phase2.eps(1.2) * 28 * math.pi / 3,
        rel=1e-12,
    )


def test_kinetic_energy_additive(ms, eq3):
    dom, sph = eq3.domain, eq3.spheres
    v1 = sph.phase1_volume
    w = np.full(4, v1 / 4)
    speed1 = RadialField(np.array([0.0, 0.0, 2.0, 2.0]), w)
    theta1 = RadialField(np.ones(4), w)
    rest = total_functionals(ms, dom, sph, (theta1, 1.0), theta_gamma=1.0)
    moving = total_functionals(ms, dom, sph, (theta1, 1.0), theta_gamma=1.0, speed=(speed1, 0.0))
    expected = 0.5 * ms.phase1.rho * 4.0 * (v1 / 2)
    assert moving.energy - rest.energy == pytest.approx(expected, rel=1e-14)


def test_bad_weights_rejected(ms, eq3):
    bad = RadialField(np.ones(3), np.ones(3))
    with pytest.raises(QuadratureFailure):
        total_functionals(ms, eq3.domain, eq3.spheres, (bad, 1.0), theta_gamma=1.0)


def test_built_equilibrium_is_consistent(eq3):
    yl, gt = eq3.residuals()
    assert abs(yl) < 1e-12 and abs(gt) < 1e-12
    assert eq3.H_star == pytest.approx(2.0)
    assert 0 < eq3.theta_star < eq3.materials.theta_c


def test_build_from_mass_and_energy(ms):
    dom = Domain(3, 2.0)
    spheres = SphereFamily(np.zeros((1, 3)), 1.0)
    E0 = float(equilibrium_energy(ms, dom, spheres, 0.8))
    eq = build_equilibrium(ms, dom, 1, mass=12 * math.pi, energy=E0)
    assert eq.radius == pytest.approx(1.0, rel=1e-13)
    assert eq.theta_star == pytest.approx(0.8, abs=1e-10)
