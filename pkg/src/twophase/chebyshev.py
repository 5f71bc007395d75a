"""Chebyshev collocation grids on radial intervals.

Two grid types are used: a Gauss-Lobatto grid on [a, b] for the shell, and
a parity-folded grid on [0, R] for the ball, obtained from a Gauss-Lobatto
grid on [-R, R] by keeping the nonnegative half and using f(-r) = p f(r)
with p = +1 or -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import BarycentricInterpolator

MIN_NODES = 8


@lru_cache(maxsize=64)
def _reference(points: int) -> tuple[np.ndarray, np.ndarray]:
    """Ascending Gauss-Lobatto nodes on [-1, 1] and the differentiation matrix."""
    N = points - 1
    x = -np.cos(np.pi * np.arange(points) / N)
    c = np.ones(points)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(points)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(points))
    D -= np.diag(D.sum(axis=1))
    x.setflags(write=False)
    D.setflags(write=False)
    return x, D


@dataclass(frozen=True)
class Grid:
    """Nodes (ascending) with first and second differentiation matrices."""

    r: np.ndarray
    D1: np.ndarray
    D2: np.ndarray

    @property
    def size(self) -> int:
        return len(self.r)


def lobatto(a: float, b: float, points: int) -> Grid:
    if points < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} nodes")
    x, D = _reference(points)
    scale = 2.0 / (b - a)
    r = a + (x + 1.0) / scale
    r[0], r[-1] = a, b
    D1 = scale * D
    return Grid(r, D1, D1 @ D1)


def folded(radius: float, points: int, parity: int) -> Grid:
    """Grid on [0, R] with `points` nodes (r = 0 first) for functions of given parity."""
    if points < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} nodes")
    full = 2 * points - 1
    x, D = _reference(full)
    centre = points - 1
    keep = np.arange(centre, full)
    mirror = centre - (keep - centre)
    scale = 1.0 / radius
    D1 = scale * D
    D2 = D1 @ D1

    def fold(M):
        out = M[np.ix_(keep, keep)].copy()
        out[:, 1:] += parity * M[np.ix_(keep, mirror[1:])]
        return out

    r = radius * x[keep]
    r[0], r[-1] = 0.0, radius
    return Grid(r, fold(D1), fold(D2))


def clenshaw_curtis(a: float, b: float, points: int) -> np.ndarray:
    """Quadrature weights on the Lobatto nodes of [a, b]."""
    N = points - 1
    theta = np.pi * np.arange(points) / N
    w = np.zeros(points)
    v = np.ones(N - 1)
    interior = slice(1, N)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N**2 - 1)
        for k in range(1, N // 2):
            v -= 2.0 * np.cos(2 * k * theta[interior]) / (4 * k**2 - 1)
        v -= np.cos(N * theta[interior]) / (N**2 - 1)
    else:
        w[0] = w[N] = 1.0 / N**2
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[interior]) / (4 * k**2 - 1)
    w[interior] = 2.0 * v / N
    return w * (b - a) / 2.0


def interpolate(nodes: np.ndarray, values: np.ndarray, targets: np.ndarray) -> np.ndarray:
    return BarycentricInterpolator(nodes, values)(targets)


def unfold(grid_r: np.ndarray, values: np.ndarray, parity: int) -> tuple[np.ndarray, np.ndarray]:
    """Extend a folded-grid function to the full symmetric node set on [-R, R]."""
    r = np.concatenate((-grid_r[:0:-1], grid_r))
    v = np.concatenate((parity * values[:0:-1], values))
    return r, v


def gauss_legendre(a: float, b: float, points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(points)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w
