"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid environment or run configuration."""


class ValidationError(ValueError):
    """Data violates a documented invariant."""


class ParseError(ValidationError):
    """Malformed serialized input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class CoverageError(ValueError):
    """A lexicon cannot express the given observation."""
