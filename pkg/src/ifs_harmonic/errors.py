"""Exception types shared by all modules."""


class IFSError(Exception):
    """Base class for every error raised by this package."""


class UsageError(IFSError, ValueError):
    """Invalid argument (bad digit index, malformed parameter, ...)."""


class DomainError(IFSError, ValueError):
    """Input lies outside the mathematical domain of the operation."""


class UnsupportedConfigurationError(IFSError, ValueError):
    """The operation is only defined for a narrower class of systems."""


class ResourceError(IFSError, RuntimeError):
    """A requested exhaustive computation exceeds its configured cap."""


class QuadratureError(IFSError, ArithmeticError):
    """Adaptive quadrature failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
