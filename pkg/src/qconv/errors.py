"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed arguments: bad lengths, dimensions, or parameter ranges."""


class ZeroNormError(InvalidInputError):
    """A sequence or state that must be normalized has zero norm."""


class ZeroOverlapError(InvalidInputError):
    """The componentwise product of two states vanishes identically."""


class DegenerateMeasurementError(RuntimeError):
    """Every outcome of a measurement has negligible probability."""
