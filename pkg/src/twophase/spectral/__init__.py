"""Mode-by-mode linear stability of concentric sphere-in-ball equilibria."""
