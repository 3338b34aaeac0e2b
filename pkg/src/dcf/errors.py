"""Exception hierarchy shared by all solver layers."""

from __future__ import annotations

from typing import Any


class DcfError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(DcfError, ValueError):
    """The caller supplied an input that violates an operation's contract."""


class BelowThresholdError(PreconditionError):
    """A guaranteed-mode solver was invoked below its degree gate."""

    def __init__(self, message: str, *, measured: int, required: int) -> None:
        super().__init__(message)
        self.measured = measured
        self.required = required


class TheoremViolation(DcfError, RuntimeError):
    """An object whose existence is guaranteed could not be found.

    ``bundle`` holds a serializable reproduction of the failing input so the
    instance can be replayed outside the process that hit it.
    """

    def __init__(self, message: str, bundle: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.bundle = bundle or {}


class BudgetExceeded(DcfError, RuntimeError):
    """A bounded search ran out of explored-node budget."""


class ParseError(DcfError, ValueError):
    def __init__(self, message: str, line: int, column: int = 1, source: str = "<input>") -> None:
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.source = source
