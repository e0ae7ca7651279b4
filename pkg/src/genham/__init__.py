"""Generalized Hamiltonians along arbitrary coordinate axes: relativistic
wave equations, generalized mechanics, axis-quantized fields and
x^1-ordered propagators, each with executable residual checks."""

from .report import Check, ResidualReport

__all__ = ["Check", "ResidualReport"]
__version__ = "0.1.0"
