"""A kernel for Cartesian cubical type theory with indexed cubical inductive types."""

__version__ = "0.1.0"
