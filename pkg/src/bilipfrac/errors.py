"""Exception hierarchy shared by every module."""


class FractalError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(FractalError, ValueError):
    pass


class NonIsometry(FractalError, ValueError):
    pass


class CapExceeded(FractalError, RuntimeError):
    pass


class RegionEscape(FractalError, RuntimeError):
    pass


class GcdNotOne(FractalError, ValueError):
    pass


class NotRepresentable(FractalError, ValueError):
    pass


class PreconditionViolated(FractalError, ValueError):
    """A documented precondition of an operation failed.

    ``which`` names the failed condition so callers can report it.
    """

    def __init__(self, message, which=None):
        super().__init__(message)
        self.which = which


class NonConvergence(FractalError, RuntimeError):
    pass


class NoSuchK(FractalError, RuntimeError):
    pass


class DegenerateSystem(FractalError, ValueError):
    pass


class ParseError(FractalError, ValueError):
    pass
