"""Cops and invisible robbers: capture-time solvers, strategies and bounds."""

__version__ = "0.1.0"
