"""Spectral toolkit and dense quantum simulator for the quantum convolution no-go."""

__version__ = "0.1.0"

from . import nogo, postselect, qsim, spectral  # noqa: E402,F401
from .errors import (  # noqa: E402,F401
    DegenerateMeasurementError,
    InvalidInputError,
    ZeroNormError,
    ZeroOverlapError,
)
