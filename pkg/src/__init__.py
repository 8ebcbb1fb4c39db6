"""Spectral solver for micropolar elastoplastic unit cells."""

__version__ = "0.1.0"
