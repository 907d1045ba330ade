"""Exact verification toolkit for plectic filtered phi-modules."""

__version__ = "0.1.0"
