"""Pairing-based identification protocols with an executable security lab."""

from .algebra import GroupSuite, Scalar, transparent_suite
from .tate import tate_suite

__all__ = ["GroupSuite", "Scalar", "transparent_suite", "tate_suite"]

__version__ = "0.1.0"
