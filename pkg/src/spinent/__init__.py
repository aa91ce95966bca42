"""Spatial structure of two-spin entanglement from occupied orbitals."""

__version__ = "0.1.0"
