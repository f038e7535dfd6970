"""Exception hierarchy. The CLI maps each class to an exit code."""


class DustSimError(Exception):
    """Base class for all package errors."""


class ParamError(DustSimError, ValueError):
    """A parameter object was constructed with an invalid value."""


class DomainError(DustSimError, ValueError):
    """A closed form was requested outside the domain where it holds."""


class ConfigError(DustSimError, ValueError):
    """A simulation configuration cannot produce usable statistics."""


class ParseError(DustSimError, ValueError):
    """Malformed census input. ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
