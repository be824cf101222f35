"""Geometric quantization of radial Kähler metrics on C^n and its blow-up at 0."""

__version__ = "0.1.0"
