"""Certified numerics for the asymmetric two-ball clamped-plate problem."""

__version__ = "0.1.0"
