"""Synthetic control estimation toolkit (python surface over the C++ core)."""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
