"""Exception types shared across the package."""


class SphericalGradientError(Exception):
    pass


class AntipodalError(SphericalGradientError, ValueError):
    """Raised when a log map is requested across the cut locus."""


class InadmissibleSpec(SphericalGradientError, ValueError):
    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class WrapViolation(SphericalGradientError, ValueError):
    """The gradient has length >= pi, so the density is undefined at that point."""


class JacobianSignError(SphericalGradientError, ArithmeticError):
    """Negative Jacobian determinant; the map is not orientation preserving."""


class DimensionError(SphericalGradientError, ValueError):
    pass


class ConstraintViolation(SphericalGradientError, ValueError):
    pass


class EmptyData(SphericalGradientError, ValueError):
    pass


class MismatchedData(SphericalGradientError, ValueError):
    pass


class MaxIterations(SphericalGradientError, RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SolverFailure(SphericalGradientError, RuntimeError):
    def __init__(self, message, index=None, cause=None):
        super().__init__(message)
        self.index = index
        self.cause = cause
