"""Growth rates of volume-exchange perturbations between m equal droplets."""

from __future__ import annotations

import numpy as np
from scipy import linalg

from ..dynamics.ripening import RipeningParams, ripening_jacobian

POSITIVE_TOL = 1e-10


def volume_exchange_spectrum(params: RipeningParams, m: int, radius: float) -> np.ndarray:
    """Eigenvalues of the linearized ripening flow on sum h_k = 0, descending.

    All spheres share one area, so area-weighted and plain sums coincide.
    """
    if m < 1:
        raise ValueError("need at least one droplet")
    J = ripening_jacobian(params, np.full(m, float(radius)))
    basis = linalg.null_space(np.ones((1, m)))
    if basis.shape[1] == 0:
        return np.zeros(0)
    reduced = basis.T @ J @ basis
    return np.sort(linalg.eigvals(reduced).real)[::-1]


def positive_count(rates: np.ndarray, tol: float = POSITIVE_TOL) -> int:
    return int(np.sum(rates > tol))
