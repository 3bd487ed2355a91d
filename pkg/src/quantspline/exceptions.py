"""Exception types raised by quantspline."""


class QuantSplineError(Exception):
    """Base class for all library errors."""


class UnsupportedOrderError(QuantSplineError, ValueError):
    pass


class InvalidPenaltyError(QuantSplineError, ValueError):
    pass


class DimensionError(QuantSplineError, ValueError):
    pass


class TooFewPointsError(QuantSplineError, ValueError):
    pass


class DegenerateRangeError(QuantSplineError, ValueError):
    pass


class DegenerateVarianceError(QuantSplineError, ValueError):
    """All quantized values coincide, so the null standardization is undefined."""


class ConfigurationError(QuantSplineError, ValueError):
    pass


class DataError(QuantSplineError, ValueError):
    """Malformed input data (missing file, non-numeric cell, bad design)."""
