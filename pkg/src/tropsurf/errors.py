"""Exception hierarchy shared by all tropsurf modules."""


class TropError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TropError):
    """Malformed input file. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(TropError):
    """Structurally well-formed input that violates a model invariant."""


class ResourceLimitError(TropError):
    """A configured resource cap (e.g. feasibility variable count) was hit."""
