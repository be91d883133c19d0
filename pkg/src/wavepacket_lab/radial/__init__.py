"""Radial spectral wave solver on a disk."""
