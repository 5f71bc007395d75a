"""Balls, spheres and the curvature convention shared by every module."""

from __future__ import annotations

import math

# Mean curvature of a sphere of radius R is reported as +(n-1)/R, with the
# unit normal pointing out of the enclosed phase 1. Every curvature-consuming
# routine reads this sign.
CURVATURE_SIGN = 1.0


def check_dimension(n: int) -> int:
    if n not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {n}")
    return n


def unit_ball_volume(n: int) -> float:
    return {2: math.pi, 3: 4.0 * math.pi / 3.0}[check_dimension(n)]


def unit_sphere_area(n: int) -> float:
    return {2: 2.0 * math.pi, 3: 4.0 * math.pi}[check_dimension(n)]


def ball_volume(n: int, radius: float) -> float:
    return unit_ball_volume(n) * radius**n


def sphere_area(n: int, radius: float) -> float:
    return unit_sphere_area(n) * radius ** (n - 1)


def mean_curvature(n: int, radius: float) -> float:
    return CURVATURE_SIGN * (n - 1) / radius
