"""Separated GR(k) synthesis toolkit."""
__version__ = "0.1.0"
