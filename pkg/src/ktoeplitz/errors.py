"""Exception hierarchy.

Input problems raise subclasses of ``ValueError``; numerical failures raise
subclasses of ``RuntimeError``.  The CLI maps these onto exit codes.
"""
from __future__ import annotations


class ConfigError(ValueError):
    """Malformed or inconsistent input data."""


class NumericalError(RuntimeError):
    """A numerical routine could not produce a trustworthy result."""


class ConvergenceError(NumericalError):
    """Iteration or quadrature failed to reach the requested accuracy."""


class OnGammaError(NumericalError):
    """The spectral parameter lies on (or too close to) the curve Gamma.

    There the two Floquet multipliers share a modulus and the contour used
    for the determinant would pass through a pole.
    """


class DegenerateBlochVectorError(NumericalError):
    """The kernel vector needed for a Floquet multiplier has a zero entry.

    The multiplier is then formally infinite (or zero) and no quasi-periodic
    extension exists.
    """


class ConsistencyError(RuntimeError):
    """Two independent criteria that must agree gave different verdicts."""
