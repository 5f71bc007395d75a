"""Tabulate the dispersion function and the leading direct eigenvalue per mode.

    python3 scripts/spectrum_scan.py --n 3 --lmax 6
"""

import argparse

from twophase.equilibria import Domain, build_equilibrium
from twophase.spectral.coefficients import Linearization
from twophase.spectral.dispersion import assemble_dispersion, dispersion_roots
from twophase.spectral.pencil import direct_mode_spectrum
from twophase.thermo import default_materials


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3, choices=(2, 3))
    ap.add_argument("--lmax", type=int, default=6)
    ap.add_argument("--nodes", type=int, default=48)
    args = ap.parse_args()

    eq = build_equilibrium(default_materials(), Domain(args.n, 2.0), 1, radius=1.0, theta=1.0)
    lin = Linearization.from_equilibrium(eq)
    print(f"{'l':>3} {'F(0.01)':>12} {'F(1)':>12} {'F(100)':>12} {'roots':>10}  leading direct eigenvalue")
    for l in range(1, args.lmax + 1):
        F = [assemble_dispersion(lin, l, lam, args.nodes).F for lam in (0.01, 1.0, 100.0)]
        roots = dispersion_roots(lin, l, nodes=args.nodes)
        lead = direct_mode_spectrum(lin, l, nodes=args.nodes).leading
        lead_s = "none" if lead is None else f"{complex(lead):.6g}"
        print(f"{l:>3} {F[0]:>12.5g} {F[1]:>12.5g} {F[2]:>12.5g} {len(roots):>10}  {lead_s}")
    sp0 = direct_mode_spectrum(lin, 0, nodes=args.nodes)
    print(f"l = 0: zero cluster size {len(sp0.zero_cluster)}, leading {sp0.leading}")


if __name__ == "__main__":
    main()
