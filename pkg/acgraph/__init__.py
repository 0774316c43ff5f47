"""Exact constructions, certificates and charging checks for alpha-AC geometric graphs."""

__version__ = "0.4.1"
