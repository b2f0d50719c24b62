"""Exception types shared across the package."""


class GarchHedgeError(Exception):
    """Base class for all package errors."""


class ParseError(GarchHedgeError):
    """Malformed input row; carries the 1-based line number when known."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ValidationError(GarchHedgeError):
    """Input violates a documented invariant."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class CoverageError(GarchHedgeError):
    """No eligible futures contract covers a required date."""


class AlignmentError(GarchHedgeError):
    """Series cannot be aligned (frequency mismatch or empty overlap)."""


class InsufficientDataError(GarchHedgeError):
    """Too few observations for the requested operation."""


class DegenerateInputError(GarchHedgeError):
    """Input is constant or otherwise carries no usable variation."""


class DomainError(GarchHedgeError):
    """Parameter outside its mathematical domain."""


class FitError(GarchHedgeError):
    """Estimation failed to converge; ``best`` holds best-so-far diagnostics."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConfigError(GarchHedgeError):
    """Invalid run configuration."""
