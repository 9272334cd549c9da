"""Pseudospectral toolkit for time-degenerate Schrodinger-type flows."""

__version__ = "0.1.0"
