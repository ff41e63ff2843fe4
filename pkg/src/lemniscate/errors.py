"""Exception types and warning categories shared across the package."""


class LemniscateError(Exception):
    """Base class for errors raised by this package."""


class ExpressionSyntaxError(LemniscateError):
    """Malformed expression text; carries the offset of the offending token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainError(LemniscateError):
    """Evaluation or series expansion requested where the function is not analytic."""


class GeometryError(LemniscateError):
    """No admissible contour or region exists for the requested configuration."""


class QuadratureError(LemniscateError):
    """Adaptive contour quadrature failed to reach the requested tolerance."""


class ConditioningWarning(UserWarning):
    """Nearly coincident expansion points; results may lose accuracy."""
