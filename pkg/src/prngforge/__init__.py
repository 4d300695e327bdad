"""Parallel MWC, XorShift and KISS pseudo-random number generators."""

__version__ = "0.1.0"
