"""Exact-arithmetic workbench for two-colored bulk/boundary graph complexes."""

__version__ = "0.1.0"
