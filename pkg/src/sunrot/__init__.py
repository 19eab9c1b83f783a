"""Exact rotation sets of degree-one PL maps of sun graphs."""

__version__ = "0.1.0"
