"""Braid types and stretch factors of simple N-body choreographies."""

__version__ = "0.1.0"
