"""Interpolation between shape-invariant Hamiltonians and their SUSY partners."""
from .params import ParameterVector

__all__ = ["ParameterVector"]
__version__ = "0.1.0"
