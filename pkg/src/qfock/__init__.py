"""Fock representation of the q-commutation relations at finite dimension and level."""

from .basis import Config

__version__ = "0.1.0"
__all__ = ["Config"]
