import math

import numpy as np
import pytest
from scipy.integrate import quad

from twophase import geometry
from twophase.dynamics import radial as rad
from twophase.dynamics.residuals import (
    RESIDUAL_NAMES,
    STENCIL_POINTS,
    FieldSnapshot,
    PhaseFields,
    angle_grid,
    angular_derivative,
    compatibility_check,
    equilibrium_snapshot,
    fornberg_weights,
    interface_residuals,
    radial_snapshot,
    snapshot_from_functions,
    surface_norm,
)
from twophase.equilibria import Domain, build_equilibrium
from twophase.errors import GridMismatch


def test_fornberg_weights_classic():
    np.testing.assert_allclose(fornberg_weights(0.0, np.array([-1.0, 0.0, 1.0]), 1), [-0.5, 0.0, 0.5], atol=1e-15)
    np.testing.assert_allclose(fornberg_weights(0.0, np.array([-1.0, 0.0, 1.0]), 2), [1.0, -2.0, 1.0], atol=1e-15)
    nodes = np.array([0.0, 0.1, 0.25, 0.3, 0.5])
    w = fornberg_weights(0.0, nodes, 1)
    for k in range(5):
        assert w @ nodes**k == pytest.approx(k * 0.0 ** (k - 1) if k else 0.0, abs=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_angular_tools(n):
    ang = angle_grid(n, 32)
    f = np.cos(ang)
    np.testing.assert_allclose(angular_derivative(n, ang, f), -np.sin(ang), atol=1e-12)
    # surface norm of a constant is its value times sqrt(area)
    assert surface_norm(n, 1.5, ang, np.full_like(ang, 2.0)) == pytest.approx(2.0 * math.sqrt(geometry.sphere_area(n, 1.5)), rel=1e-13)


@pytest.mark.parametrize("n", [2, 3])
def test_equilibrium_snapshot_residuals_vanish(ms, n):
    eq = build_equilibrium(ms, Domain(n, 2.0), 1, radius=1.0, theta=1.0)
    res = interface_residuals(ms, equilibrium_snapshot(eq))
    assert set(res) == set(RESIDUAL_NAMES)
    assert max(res.values()) < 1e-10


def test_equilibrium_snapshot_requires_single_centred_sphere(ms):
    eq = build_equilibrium(ms, Domain(3, 4.0), 2, radius=1.0, theta=1.0)
    with pytest.raises(GridMismatch):
        equilibrium_snapshot(eq)


@pytest.mark.parametrize("n", [2, 3])
def test_manufactured_radial_outflow(ms, n):
    # u = c / r^(n-1) e_r in phase 2: divergence free, jump relations satisfied by construction
    eq = build_equilibrium(ms, Domain(n, 2.0), 1, radius=1.0, theta=1.0)
    c, R = 0.3, 1.0
    rho1, rho2 = ms.phase1.rho, ms.phase2.rho
    V = rho2 * c / (rho2 - rho1)

    def fields(k, r, a):
        return (c / r ** (n - 1) if k == 1 else 0.0 * r), 0.0, (eq.pi1, eq.pi2)[k], 1.0

    fields.interface = lambda a: (1.0, V, 0.0)
    snap = snapshot_from_functions(ms, n, R, 2.0, 160, 8, fields)
    res = interface_residuals(ms, snap)
    assert res["normal_velocity_jump"] < 1e-12 and res["kinematic"] < 1e-12
    jump_inv = 1 / rho2 - 1 / rho1
    j = c / jump_inv
    closed = abs(jump_inv * j**2 + 2 * float(ms.phase2.mu(1.0)) * (n - 1) * c) * math.sqrt(geometry.sphere_area(n, R))
    assert res["normal_stress"] == pytest.approx(closed, rel=1e-6)
    assert compatibility_check(ms, snap).passed["div_free"]


@pytest.mark.parametrize("n", [2, 3])
def test_surface_energy_residual_refines_at_stencil_order(ms, n):
    # temperature with a flux jump at r = 1; continuum residual is -(d2 T2' - d1 T1')
    def fields(k, r, a):
        th = 1 + 0.05 * (np.exp(r) - math.e) if k == 0 else 1 + 0.05 * np.sin(r - 1)
        return 0.0, 0.0, 0.0, th

    fields.interface = lambda a: (1.0, 0.0, 0.0)
    exact = abs(0.05 - 0.05 * math.e) * math.sqrt(geometry.sphere_area(n, 1.0))
    errs = []
    for points in (20, 40, 80):
        snap = snapshot_from_functions(ms, n, 1.0, 2.0, points, 8, fields)
        errs.append(abs(interface_residuals(ms, snap)["surface_energy"] - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert orders.min() >= STENCIL_POINTS - 1 - 0.5


def _rest(n, theta_fn, pressures=(0.0, 0.0)):
    def fields(k, r, a):
        return 0.0, 0.0, pressures[k], theta_fn(r, a)

    return fields


@pytest.mark.parametrize("n", [2, 3])
def test_compatibility_rest_constant(ms, n):
    snap = snapshot_from_functions(ms, n, 1.0, 2.0, 12, 16, _rest(n, lambda r, a: 1.0 + 0 * r))
    assert compatibility_check(ms, snap).ok


@pytest.mark.parametrize("n", [2, 3])
def test_marangoni_failure_matches_quadrature(ms, n):
    amp, R = 0.1, 1.0
    snap = snapshot_from_functions(ms, n, R, 2.0, 12, 32, _rest(n, lambda r, a: 1.0 + amp * np.cos(a) + 0 * r))
    rep = compatibility_check(ms, snap)
    assert not rep.passed["marangoni"]
    sigma = ms.surface.sigma

    def density(a):
        th = 1.0 + amp * math.cos(a)
        return (sigma.deriv(th, 1) * amp * math.sin(a) / R) ** 2

    if n == 2:
        integral = quad(density, 0, 2 * math.pi)[0] * R
    else:
        integral = quad(lambda a: density(a) * math.sin(a), 0, math.pi)[0] * 2 * math.pi * R**2
    assert rep.residuals["marangoni"] == pytest.approx(math.sqrt(integral), rel=1e-10)


def _stream_fields(power, phases=(0, 1)):
    # u = curl(r^power sin a) in the plane: u_r = r^(power-1) cos a, u_a = -power r^(power-1) sin a
    def fields(k, r, a):
        on = k in phases
        return on * r ** (power - 1) * np.cos(a), -on * power * r ** (power - 1) * np.sin(a), 0.0, 1.0

    return fields


def test_divergence_free_field_passes(ms):
    snap = snapshot_from_functions(ms, 2, 1.0, 2.0, 20, 16, _stream_fields(2))
    rep = compatibility_check(ms, snap)
    assert rep.passed["div_free"]


def test_divergence_check_refines(ms):
    # away from the origin the three-point radial stencil is second order
    errs = []
    for points in (20, 40, 80):
        snap = snapshot_from_functions(ms, 2, 1.0, 2.0, points, 16, _stream_fields(3, phases=(1,)))
        errs.append(compatibility_check(ms, snap).residuals["div_free"])
    assert math.log2(errs[1] / errs[2]) >= 1.8


def test_wall_conditions_flagged(ms):
    snap = snapshot_from_functions(ms, 2, 1.0, 2.0, 20, 16, _rest(2, lambda r, a: 1.0 + 0.1 * r + 0 * a))
    rep = compatibility_check(ms, snap)
    assert not rep.passed["neumann"]
    assert rep.passed["no_slip"]
    d = rep.to_dict()
    assert set(d) == {"tol", "residuals", "scales", "passed"}


def _phase(r, k, value=0.0):
    z = np.full((len(r), k), value)
    return PhaseFields(r, z, z.copy(), z.copy(), z + 1.0)


def test_snapshot_grid_validation():
    ang = angle_grid(2, 8)
    r1, r2 = np.linspace(0, 1, 6), np.linspace(1, 2, 6)
    ok = FieldSnapshot(2, 1.0, 2.0, ang, _phase(r1, 8), _phase(r2, 8), np.ones(8), np.zeros(8), np.zeros(8))
    assert ok.n == 2
    with pytest.raises(GridMismatch):
        FieldSnapshot(2, 1.0, 2.0, ang, _phase(r1, 7), _phase(r2, 8), np.ones(8), np.zeros(8), np.zeros(8))
    with pytest.raises(GridMismatch):
        FieldSnapshot(2, 1.0, 2.0, ang, _phase(r1, 8), _phase(r2, 8), np.ones(7), np.zeros(8), np.zeros(8))
    with pytest.raises(GridMismatch):
        FieldSnapshot(2, 1.1, 2.0, ang, _phase(r1, 8), _phase(r2, 8), np.ones(8), np.zeros(8), np.zeros(8))
    with pytest.raises(GridMismatch):
        short = np.linspace(0, 1, STENCIL_POINTS - 1)
        FieldSnapshot(2, 1.0, 2.0, ang, _phase(short, 8), _phase(r2, 8), np.ones(8), np.zeros(8), np.zeros(8))
    with pytest.raises(GridMismatch):
        FieldSnapshot(2, 1.0, 2.0, ang + 0.1, _phase(r1, 8), _phase(r2, 8), np.ones(8), np.zeros(8), np.zeros(8))


@pytest.mark.parametrize("n", [2, 3])
def test_radial_trajectory_snapshots(ms, n):
    exact_names = set(RESIDUAL_NAMES) - {"surface_energy"}
    energy = []
    for cells in (20, 40, 80):
        g = rad.RadialGrid(n, 1.0, 2.0, cells, cells)
        s = rad.RadialState.from_profile(g, rad.initial_family("cosine", g, 1.0, 0.2))
        s = rad.radial_step(ms, g, s, 0.05)
        nxt = rad.radial_step(ms, g, s, 1e-5)
        rate = (nxt.theta_gamma - s.theta_gamma) / 1e-5
        res = interface_residuals(ms, radial_snapshot(ms, g, s, rate))
        assert max(res[k] for k in exact_names) < 1e-12
        energy.append(res["surface_energy"])
    # the finite-volume interface flux is a one-sided difference: first order in the cell size
    assert math.log2(energy[1] / energy[2]) >= 0.8
