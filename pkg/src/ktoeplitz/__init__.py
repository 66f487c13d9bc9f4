"""Edge and interface modes of k-Toeplitz operators and their finite sections."""
from __future__ import annotations

from .errors import (
    ConfigError,
    ConsistencyError,
    ConvergenceError,
    DegenerateBlochVectorError,
    NumericalError,
    OnGammaError,
)
from .symbol import UnitCell, make_unit_cell

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "ConvergenceError",
    "DegenerateBlochVectorError",
    "NumericalError",
    "OnGammaError",
    "UnitCell",
    "make_unit_cell",
    "__version__",
]
