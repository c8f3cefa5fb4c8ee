"""Aggregate Loewner evolution laboratory."""
__version__ = "0.1.0"
