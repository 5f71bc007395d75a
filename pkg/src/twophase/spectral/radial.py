"""Per-mode radial grids and the operator f'' + (n-1)/r f' - L/r^2 f."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import chebyshev

DEFAULT_NODES = 48


@dataclass(frozen=True)
class ModeGrids:
    """Folded grid on [0, R] (index 0 is the centre) and Lobatto grid on [R, R_outer]."""

    n: int
    l: int
    inner: chebyshev.Grid
    outer: chebyshev.Grid

    @classmethod
    def build(cls, n: int, l: int, R: float, R_outer: float, nodes: int = DEFAULT_NODES) -> ModeGrids:
        parity = 1 if l % 2 == 0 else -1
        return cls(n, l, chebyshev.folded(R, nodes, parity), chebyshev.lobatto(R, R_outer, nodes))

    @property
    def symbol(self) -> int:
        return self.l * (self.l + self.n - 2)

    @property
    def sizes(self) -> tuple[int, int]:
        return self.inner.size, self.outer.size


def laplacian(grid: chebyshev.Grid, n: int, symbol: int) -> np.ndarray:
    """Radial Laplacian of a degree-l mode, with the r = 0 row replaced by its limit.

    At the centre the limit is only used for l = 0 (even functions, f'(0) = 0),
    where (n-1)/r f' tends to (n-1) f''(0).
    """
    r = grid.r
    op = np.array(grid.D2, copy=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        op += ((n - 1) / r)[:, None] * grid.D1 - np.diag(symbol / r**2)
    if r[0] == 0.0:
        op[0] = n * grid.D2[0] if symbol == 0 else np.nan
    return op
