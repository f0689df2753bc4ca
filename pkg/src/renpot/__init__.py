"""Renewable energy potentials from land-use and building data."""

__version__ = "0.1.0"
