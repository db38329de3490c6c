"""Exception types shared across the package."""


class QcsLabError(Exception):
    """Base class for all qcslab errors."""


class InvalidParameterError(QcsLabError, ValueError):
    """A parameter is outside its documented domain."""


class DimensionMismatchError(QcsLabError, ValueError):
    """Vector/matrix shapes do not agree."""


class DegenerateMatrixError(QcsLabError):
    """Matrix does not have the rank required by the operation."""


class DegenerateRangeError(QcsLabError):
    """Quantizer range collapsed to zero (all-zero input)."""


class DegenerateSupportError(QcsLabError):
    """Support submatrix is rank deficient."""


class ConfigError(QcsLabError, ValueError):
    """Experiment configuration is malformed.

    Carries the offending field path so callers can point at the exact
    entry in a JSON document.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
