"""Braid monodromy, handle decompositions and Kirby diagrams of complex plane curves."""

__version__ = "0.1.0"
