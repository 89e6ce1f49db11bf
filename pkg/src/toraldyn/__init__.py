"""Toral automorphisms: exact algebra, certified spectra, Schmidt games and equidistribution experiments."""

__version__ = "0.1.0"
