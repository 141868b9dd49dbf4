"""Rigorous adiabatic-error bounds and two-level simulation."""

__version__ = "0.1.0"
