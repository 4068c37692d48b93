"""Blow-up solutions of the sinh-Poisson equation and the spectrum of their linearization."""

from ._core import BACKEND
from .domain import DomainSpec

__version__ = "0.1.0"

__all__ = ["BACKEND", "DomainSpec", "__version__"]
