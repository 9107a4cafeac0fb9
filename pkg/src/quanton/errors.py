"""Exception hierarchy for quanton."""


class QuantonError(Exception):
    """Base class for all quanton errors."""


class ValidationError(QuantonError, ValueError):
    """An object violates one of its structural invariants."""


class DimensionError(ValidationError):
    """Array dimensions are inconsistent with the requested operation."""


class NotHermitianError(ValidationError):
    """Matrix deviates from Hermiticity beyond the accepted tolerance."""


class ConfigError(QuantonError, ValueError):
    """Invalid run configuration (bad parameter values, unknown keys)."""


class MeasureRejectedError(QuantonError):
    """A candidate measure failed criteria validation and cannot be used."""


class EvaluationError(QuantonError, RuntimeError):
    """A candidate measure raised or returned a non-finite value."""
