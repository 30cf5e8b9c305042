"""Shortest paths and Weber points in subdivisions with per-region lp norms."""
__version__ = "0.1.0"
