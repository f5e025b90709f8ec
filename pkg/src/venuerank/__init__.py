"""Personalized, context-aware venue ranking."""

__version__ = "0.1.0"
