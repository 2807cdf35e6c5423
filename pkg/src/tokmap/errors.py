"""Exception hierarchy shared across the toolkit."""


class TokmapError(Exception):
    """Base class for all toolkit errors."""


class ParseError(TokmapError):
    """A text input could not be parsed; carries the offending line number."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ValidationError(TokmapError):
    """An input violates a documented invariant."""


class ZeroNormError(TokmapError):
    """A query vector has zero norm and cannot be cosine-ranked."""


class FormatError(TokmapError):
    """A binary file does not conform to its exchange format."""
