"""Exception hierarchy shared by every partreg module."""


class PartregError(Exception):
    """Base class for all errors raised by partreg."""


class DimensionError(PartregError, ValueError):
    """Vectors or matrices with incompatible shapes."""


class MalformedInputError(PartregError, ValueError):
    """Input that violates a documented structural precondition."""


class TooLargeError(PartregError):
    """An exponential search was asked to run above its configured bound."""


class WindowError(PartregError, ValueError):
    """A finite window does not cover the requested range."""


class SolverError(PartregError):
    """An external SAT solver failed or produced output that did not verify."""
