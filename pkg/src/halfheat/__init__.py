"""Verification toolkit for half-temperature domains in 3-dimensional space forms."""

__version__ = "0.1.0"
