import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twophase.dynamics.ripening import (
    RipeningParams,
    far_field_temperature,
    ripening_jacobian,
    ripening_rhs,
    simulate_ripening,
)
from twophase.errors import DropletCollapse, GammaZero
from twophase.spectral.exchange import volume_exchange_spectrum
from twophase.thermo import default_materials


@pytest.fixture(scope="module", params=[2, 3], ids=["n2", "n3"])
def params(request):
    return RipeningParams.from_materials(default_materials(), request.param, 1.0)


radii_lists = st.lists(st.floats(0.3, 2.0), min_size=1, max_size=6)


def test_params_from_materials():
    p = RipeningParams.from_materials(default_materials(), 3, 1.0)
    assert (p.sigma, p.gamma, p.rho1, p.latent) == pytest.approx((0.75, 0.1, 2.0, 0.5))
    assert p.rate_constant == pytest.approx(0.75 * 2 / (0.1 * 4))


def test_zero_kinetic_coefficient_rejected():
    with pytest.raises(GammaZero):
        RipeningParams.from_materials(default_materials(0.0), 3, 1.0)


def test_equal_radii_are_stationary(params):
    np.testing.assert_allclose(ripening_rhs(params, [0.7, 0.7, 0.7]), 0.0, atol=1e-15)


@given(st.floats(0.1, 3.0))
def test_single_droplet_is_stationary(R):
    p = RipeningParams.from_materials(default_materials(), 3, 1.0)
    assert abs(ripening_rhs(p, [R])[0]) < 1e-14


def test_larger_droplet_grows(params):
    eps = 1e-3
    rates = ripening_rhs(params, [1 + eps, 1 - eps])
    assert rates[0] - rates[1] > 0
    # linearized growth of the difference equals the positive exchange eigenvalue
    lam = volume_exchange_spectrum(params, 2, 1.0)[0]
    assert (rates[0] - rates[1]) / (2 * eps) == pytest.approx(lam, rel=1e-3)


@given(radii_lists)
def test_rates_conserve_volume(radii):
    p = RipeningParams.from_materials(default_materials(), 3, 1.0)
    r = np.array(radii)
    rates = ripening_rhs(p, r)
    grad = r ** (p.n - 1)
    assert abs(grad @ rates) <= 1e-12 * np.abs(grad).sum() * max(1.0, np.abs(rates).max())


@given(radii_lists, st.randoms())
def test_rates_permutation_equivariant(radii, rnd):
    p = RipeningParams.from_materials(default_materials(), 2, 1.0)
    r = np.array(radii)
    perm = list(range(len(r)))
    rnd.shuffle(perm)
    np.testing.assert_allclose(ripening_rhs(p, r[perm]), ripening_rhs(p, r)[perm], rtol=1e-13, atol=1e-14)


def test_jacobian_matches_finite_differences(params, rng):
    r = rng.uniform(0.6, 1.4, 4)
    J = ripening_jacobian(params, r)
    h = 1e-6
    fd = np.column_stack([(ripening_rhs(params, r + h * e) - ripening_rhs(params, r - h * e)) / (2 * h) for e in np.eye(4)])
    np.testing.assert_allclose(J, fd, rtol=1e-6, atol=1e-8)


def test_collapse_signal(params):
    with pytest.raises(DropletCollapse):
        ripening_rhs(params, [1.0, 1e-4], r_min=1e-3)


def test_two_droplets_coarsen(params):
    n = params.n
    traj = simulate_ripening(params, [1.01, 0.99], T=400.0, dt=0.5)
    assert len(traj.events) == 1 and traj.events[0]["droplet"] == 1
    survivor = traj.final_radii
    assert len(survivor) == 1
    assert survivor[0] == pytest.approx((1.01**n + 0.99**n) ** (1 / n), rel=1e-8)


def test_single_droplet_trajectory(params):
    traj = simulate_ripening(params, [0.8], T=5.0, dt=0.1)
    np.testing.assert_array_equal(traj.t, [0.0, 5.0])
    np.testing.assert_array_equal(traj.radii, [[0.8], [0.8]])
    assert traj.events == []


def test_conservation_and_area_monotone(params, rng):
    n = params.n
    init = rng.uniform(0.8, 1.2, 5)
    traj = simulate_ripening(params, init, T=300.0, dt=0.25)
    total = np.nansum(traj.radii**n, axis=1)
    assert np.max(np.abs(total - total[0])) <= 1e-8 * total[0]
    area = np.nansum(traj.radii ** (n - 1), axis=1)
    assert np.all(np.diff(area) <= 1e-10 * area[0])
    assert len(traj.final_radii) == 1
    assert traj.final_radii[0] == pytest.approx(total[0] ** (1 / n), rel=1e-8)
    assert np.all(np.isfinite(traj.theta_bar))


def test_trajectory_permutation_equivariant(params):
    init = np.array([1.05, 0.9, 1.0])
    perm = [2, 0, 1]
    a = simulate_ripening(params, init, T=20.0, dt=0.5)
    b = simulate_ripening(params, init[perm], T=20.0, dt=0.5)
    np.testing.assert_allclose(b.radii, a.radii[:, perm], rtol=1e-7)


def test_escape_rate_matches_leading_eigenvalue():
    p = RipeningParams.from_materials(default_materials(), 3, 1.0)
    rate = volume_exchange_spectrum(p, 3, 1.0)[0]
    eps = 1e-7
    init = np.array([1 + eps, 1 - eps / 2, 1 - eps / 2])
    traj = simulate_ripening(p, init, T=8.0 / rate, dt=0.05 / rate)
    dev = np.abs(traj.radii[:, 0] - 1.0)
    linear = np.isfinite(dev) & (dev > 10 * eps) & (dev < 1e-3)
    slope = np.polyfit(traj.t[linear], np.log(dev[linear]), 1)[0]
    assert slope == pytest.approx(rate, rel=0.05)


def test_far_field_temperature_at_equal_radii(params):
    assert far_field_temperature(params, [1.0, 1.0], 1.0) == pytest.approx(params.theta, rel=1e-14)
