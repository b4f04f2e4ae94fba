"""Exact computer algebra for properadic calculus over the rationals."""

__version__ = "0.1.0"
