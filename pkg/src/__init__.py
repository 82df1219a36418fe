"""Pivot Carleman - divergence-free linearization simulators for polynomial ODEs."""

__version__ = "0.1.0"
