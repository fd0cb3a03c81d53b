class DipoleKitError(Exception):
    """Base class for all package errors."""


class ConfigError(DipoleKitError, ValueError):
    """Invalid scenario or run configuration."""


class DomainError(DipoleKitError, ValueError):
    """Argument outside the domain of a formula (zero separation, pole, ...)."""


class NumericalError(DipoleKitError, ArithmeticError):
    """Quadrature, extrapolation or linear-algebra failure."""


class DegenerateSteadyStateError(NumericalError):
    """Generator kernel is not one-dimensional."""
