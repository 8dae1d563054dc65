"""Entanglement localization in graph states and Haar-random states."""

__version__ = "0.1.0"
