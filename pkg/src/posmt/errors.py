"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PosmtError(Exception):
    """Base class for all errors raised by posmt."""


class SignatureError(PosmtError):
    """Malformed signature, or a symbol used against its declaration."""


class StructureError(PosmtError):
    """Malformed structure: non-total function, stray element, empty universe."""


class FormulaError(PosmtError):
    """Ill-formed formula: unbound variable, arity clash, shape violation."""


class ParseError(PosmtError):
    """Syntax error in one of the text formats, with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class BudgetExceeded(PosmtError):
    """A bounded search ran past its node cap or blow-up cap."""
