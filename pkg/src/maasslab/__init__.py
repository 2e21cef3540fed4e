"""Numerical verification laboratory for generalized Maass wave forms."""

__version__ = "0.1.0"
