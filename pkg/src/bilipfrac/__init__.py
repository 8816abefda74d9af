"""Exact analysis of lattice self-similar sets and graph-directed systems."""

__version__ = "0.1.0"
