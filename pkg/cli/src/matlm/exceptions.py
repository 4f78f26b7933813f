from __future__ import annotations

from pathlib import Path


class MatlmError(Exception):
    """Base class for every error raised by the ranking library."""


class DomainError(MatlmError, ValueError):
    """Raised when a kernel or model precondition is violated."""


class ConfigError(MatlmError):
    """Raised when a run configuration is incomplete or inconsistent."""


class DataFileError(MatlmError):
    """Raised when an input file cannot be parsed or fails validation."""

    def __init__(self, path: Path | str, message: str, line: int | None = None) -> None:
        self.path = Path(path)
        self.line = line
        self.message = message
        location = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{location}: {message}")
