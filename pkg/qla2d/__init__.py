"""Qubit lattice algorithm for 2D Maxwell pulse scattering at dielectric interfaces."""

__version__ = "0.1.0"
