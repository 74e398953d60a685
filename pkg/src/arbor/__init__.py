"""Automorphism groups of trees: exact tools for small instances."""
__version__ = "0.1.0"
