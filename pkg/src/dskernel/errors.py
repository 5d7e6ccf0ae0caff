"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Raised when an argument violates a documented precondition."""


class ConvergenceError(RuntimeError):
    """Raised when an operation requires a converged scaling solution."""


class ParseError(ValueError):
    """Raised on malformed input files; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
