"""Entanglement of two harmonically trapped particles with a contact interaction."""

__version__ = "1.0.0"
