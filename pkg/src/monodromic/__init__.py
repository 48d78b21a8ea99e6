"""Formal and numerical return maps of monodromic planar singularities."""

__version__ = "0.1.0"
