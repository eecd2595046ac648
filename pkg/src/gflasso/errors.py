"""Exception hierarchy. Configuration problems map to CLI exit code 2, I/O to 3."""


class GFlassoError(Exception):
    """Base class for all package errors."""


class ConfigurationError(GFlassoError, ValueError):
    """Invalid parameters or inconsistent settings."""


class DimensionError(ConfigurationError):
    """Array shapes do not agree."""


class ParseError(GFlassoError, ValueError):
    """Malformed input file."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class ValidationError(ParseError):
    """Input parsed but an entry lies outside its allowed domain."""


class DegenerateColumnError(ConfigurationError):
    """A column has zero variance where nonzero variance is required."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class InvalidEdgeError(ConfigurationError):
    """Graph edge that cannot be used (self-loop, zero correlation, unknown trait)."""


class SolverError(GFlassoError, RuntimeError):
    """The QP solver did not certify a solution.

    ``solution`` carries the best iterate and its KKT residual.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution
