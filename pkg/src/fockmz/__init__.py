"""Marcinkiewicz-Zygmund and uniform interpolating families for polynomials in Fock space."""

__version__ = "0.1.0"
