"""Weyl-algebra operators and Newton iteration on remainder maps."""

__version__ = "0.1.0"
