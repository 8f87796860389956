"""Exception hierarchy shared by the parsers and the engine."""

from __future__ import annotations


class PCIError(Exception):
    """Base class for every error raised by this package."""


class ParseError(PCIError):
    """A text document does not follow its grammar."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        if self.column is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, column {self.column}: {self.message}"


class UnknownTypeError(PCIError, KeyError):
    """A type identifier does not resolve in the vocabulary at hand."""

    def __str__(self) -> str:
        return Exception.__str__(self)
