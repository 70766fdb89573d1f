"""Rescaling total sequences into lower frames, with certificates."""

__version__ = "0.1.0"
