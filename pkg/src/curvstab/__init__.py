"""Stability of quadratic curvature functionals at products of Einstein manifolds."""

__version__ = "0.1.0"
