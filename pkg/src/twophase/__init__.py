"""Numerical toolkit for a sharp-interface two-phase model with phase transition."""

__version__ = "0.1.0"
