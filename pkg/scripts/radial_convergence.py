"""Refinement study of the discrete entropy-production identity for the radial solver."""

import numpy as np

from twophase.acceptance import radial_convergence_orders
from twophase.config import config_from_dict
from twophase.dynamics import radial


def main():
    cfg = config_from_dict({})
    ms = cfg.material_set()
    grid = radial.RadialGrid(3, 1.0, 2.0, 20, 20)
    init = radial.RadialState.from_profile(grid, radial.initial_family("cosine", grid, 1.0, 0.15))
    print(f"{'dt':>10} {'defect':>14}")
    prev = None
    for dt in (0.02, 0.01, 0.005, 0.0025, 0.00125):
        d = radial.simulate_radial(ms, grid, init, 0.4, dt).production_defect()
        order = "" if prev is None else f"  order {np.log2(prev / d):.3f}"
        print(f"{dt:>10g} {d:>14.6e}{order}")
        prev = d
    dt_order, dr_order = radial_convergence_orders(cfg)
    print(f"observed order in dt {dt_order:.4f}, in dr {dr_order:.4f}")


if __name__ == "__main__":
    main()
