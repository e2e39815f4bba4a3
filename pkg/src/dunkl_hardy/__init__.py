"""Dunkl harmonic analysis for the reflection group Z_2^n at desk scale."""

from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
