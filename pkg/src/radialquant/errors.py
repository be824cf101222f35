"""Exception hierarchy shared by the library and the command line front end."""


class RadialQuantError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(RadialQuantError, ValueError):
    """An argument lies outside the domain of the requested quantity."""

    exit_code = 4


class DegenerateParameterError(DomainError):
    """A Pochhammer factor in a truncated Kummer series vanishes."""


class NotASectionError(DomainError):
    """A monomial vanishes to lower order than the section space allows."""


class NoClosedFormError(RadialQuantError):
    """No closed-form norm exists for this potential; use the quadrature path."""

    exit_code = 4


class DivergenceError(RadialQuantError):
    """A weighted norm integral does not converge."""

    exit_code = 3


class PrecisionError(RadialQuantError):
    """A series or quadrature could not reach the requested tolerance.

    The best available partial result is kept on ``partial``.
    """

    exit_code = 3

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class OracleFailure(RadialQuantError):
    """The finite-difference oracle could not produce a trustworthy value."""

    exit_code = 3


class ConfigError(RadialQuantError, ValueError):
    """Invalid run configuration."""

    exit_code = 2
