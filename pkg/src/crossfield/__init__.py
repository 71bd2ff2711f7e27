"""Resonance poles of a 2D electron bound to a zero-range impurity in crossed fields."""

__version__ = "0.1.0"
