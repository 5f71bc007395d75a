"""Surface harmonics on circles and spheres.

Harmonics are real and orthonormal on the unit sphere. On a sphere of
radius R the orthonormal family is Y / R**((n-1)/2).
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .geometry import check_dimension


def multiplicity(n: int, degree: int) -> int:
    """Number of independent harmonics of the given degree."""
    check_dimension(n)
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if n == 3:
        return 2 * degree + 1
    return 1 if degree == 0 else 2


def laplace_beltrami_symbol(n: int, degree: int) -> int:
    """L = l(l+n-2); the Laplace-Beltrami eigenvalue on the unit sphere is -L."""
    return degree * (degree + n - 2)


def laplace_beltrami_eigenvalue(n: int, degree: int, radius: float = 1.0) -> float:
    return -laplace_beltrami_symbol(n, degree) / radius**2


def surface_operator_eig(n: int, degree: int, radius: float) -> float:
    """Symbol of A = -(n-1)/R^2 - Laplace-Beltrami on degree-l harmonics."""
    return (laplace_beltrami_symbol(n, degree) - (n - 1)) / radius**2


def mode_indices(n: int, lmax: int) -> list[tuple[int, int]]:
    """(degree, order) pairs in storage order for degrees 0..lmax."""
    out = []
    for deg in range(lmax + 1):
        if n == 3:
            out.extend((deg, k) for k in range(-deg, deg + 1))
        elif deg == 0:
            out.append((0, 0))
        else:
            out.extend([(deg, -deg), (deg, deg)])
    return out


def coefficient_count(n: int, lmax: int) -> int:
    return (lmax + 1) ** 2 if check_dimension(n) == 3 else 2 * lmax + 1


def degrees(n: int, lmax: int) -> np.ndarray:
    return np.array([d for d, _ in mode_indices(n, lmax)], dtype=int)


def real_harmonic(n: int, degree: int, order: int, *angles) -> np.ndarray:
    """Evaluate a real orthonormal harmonic on the unit sphere.

    For n = 2 pass the polar angle phi; order < 0 selects sin, order > 0 cos.
    For n = 3 pass (colatitude, azimuth).
    """
    if check_dimension(n) == 2:
        (phi,) = angles
        phi = np.asarray(phi, dtype=float)
        if degree == 0:
            return np.full_like(phi, 1.0 / np.sqrt(2.0 * np.pi))
        trig = np.sin if order < 0 else np.cos
        return trig(degree * phi) / np.sqrt(np.pi)
    colat, azim = angles
    m = abs(order)
    y = special.sph_harm_y(degree, m, colat, azim)
    if order == 0:
        return np.real(y)
    sign = (-1.0) ** m
    if order > 0:
        return np.sqrt(2.0) * sign * np.real(y)
    return np.sqrt(2.0) * sign * np.imag(y)
