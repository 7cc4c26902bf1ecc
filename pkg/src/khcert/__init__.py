"""Koksma-Hlawka type error certificates for quasi-Monte Carlo quadrature."""

__version__ = "0.1.0"
