"""Finite-dimensional experiments with operator-space tensor norms."""

__version__ = "0.1.0"
