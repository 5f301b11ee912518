"""Numerical workbench for alpha-bit capacities, decoupling and resource identities."""

__version__ = "0.1.0"
