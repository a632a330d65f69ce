"""Finite-horizon verification of orbit-based fixed point theorems."""

__version__ = "0.1.0"
