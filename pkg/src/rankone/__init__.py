"""Exact, matrix-free left-invertibility tests for rank-one perturbations."""
__version__ = "0.1.0"
