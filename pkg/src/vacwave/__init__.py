"""Vacuum-connected rarefaction waves for 1-D Navier-Stokes with density-dependent viscosity."""

__version__ = "0.1.0"
