"""Exception and warning types raised by arctomo."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class AntipodalError(ValueError):
    """The two endpoints of an arc are (numerically) antipodal."""


class DegenerateError(ValueError):
    """The two endpoints of an arc coincide."""


class QuadratureFormatError(ValueError):
    """A quadrature node file could not be parsed or is invalid."""


class MeasurementFormatError(ValueError):
    """An arc measurement file could not be parsed."""


class SingularValueError(ZeroDivisionError):
    """Division by a vanishing singular value."""


class ExactnessWarning(UserWarning):
    """A quadrature rule is not exact for the requested degree."""
