"""Errors raised by the agent-definition language front end."""

from __future__ import annotations


class LangError(Exception):
    """Base class for language front-end errors.

    Parameters
    ----------
    message:
        Human-readable description of the problem.
    line, col:
        1-based position of the offending text, when known.
    """

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, col {col})"
        super().__init__(message)


class LexError(LangError):
    """A character that no token can start with."""


class ParseError(LangError):
    """Token stream does not match the grammar."""


class SemanticError(LangError):
    """Grammatically valid text with out-of-range or inconsistent values."""


class NotANorm(LangError):
    """A literal handed to the norm parser that is not a norm(...) literal."""
