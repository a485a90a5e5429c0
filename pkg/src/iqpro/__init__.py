"""Finite invariants of the maximal pro-p extension unramified outside p
of an imaginary quadratic field."""

__version__ = "0.1.0"
