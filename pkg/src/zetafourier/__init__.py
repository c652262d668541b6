"""Fourier expansions of zeta-related functions in the basis exp(-2in arctan 2x)."""

__version__ = "0.1.0"
