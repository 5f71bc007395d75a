"""Reduced time-dependent simulators and residual evaluation."""
