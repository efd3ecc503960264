"""Exception hierarchy shared by the library, the CLI and the HTTP surface."""


class AbfluxError(Exception):
    """Base class for every error raised by abflux."""


class DomainError(AbfluxError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class ConfigError(AbfluxError, ValueError):
    """Invalid settings, command-line options or JSON parameters."""


class NotInvertible(AbfluxError, ArithmeticError):
    """The boundary condition leaves the Lambda chart (|d| too small)."""


class DegenerateDenominator(AbfluxError, ArithmeticError):
    """The half-flux closed form has a vanishing denominator."""


class NotAnEigenvalue(AbfluxError, ArithmeticError):
    """The boundary-condition matrix is far from singular at the given p."""


class RootFindingError(AbfluxError, ArithmeticError):
    """The bound-state search could not reconcile the expected root count."""


class ForwardDirection(AbfluxError, ValueError):
    """The scattering kernel was requested inside the forward cone."""


class FitFailure(AbfluxError, ArithmeticError):
    """Small-r samples are not in the two-term asymptotic regime."""
