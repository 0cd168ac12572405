"""Finite partial groups, localities, and their extensions."""

__version__ = "0.1.0"
