"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class EmptyRequestError(DomainError):
    """A count or size of zero was requested."""


class ParseError(ValueError):
    """Malformed input text; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FitError(RuntimeError):
    """A least-squares fit failed; ``seed`` holds the unrefined peak."""

    def __init__(self, message: str, seed=None):
        super().__init__(message)
        self.seed = seed
