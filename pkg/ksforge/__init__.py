"""Kuramoto-Sivashinsky simulation, stripe tracking and chaos diagnostics."""

__version__ = "0.1.0"
