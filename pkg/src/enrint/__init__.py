"""Finite enriched and internal category theory over finset and fincat."""

__version__ = "0.1.0"
