"""Survival probabilities, Zeno effect and the AgBr model."""

from ._core import *  # noqa: F401,F403
from ._core import ArgumentError, NumericalError

__all__ = [name for name in dir() if not name.startswith("_")]
