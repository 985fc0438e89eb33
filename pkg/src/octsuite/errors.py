"""Exception types shared across the package."""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed graph input. ``line`` is 1-indexed, or None if not line-specific."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContractViolation(ValueError):
    """A caller broke an operation's precondition."""


class RefusedError(RuntimeError):
    """An exhaustive routine declined an instance larger than its cap."""


class ConfigurationError(RuntimeError):
    """External solver is missing or the command template is unusable."""


class IntegrationError(RuntimeError):
    """External solver ran but its output could not be interpreted."""

    def __init__(self, message: str, raw_output: str = ""):
        super().__init__(message)
        self.raw_output = raw_output
