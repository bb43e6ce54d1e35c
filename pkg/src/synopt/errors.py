"""Exception hierarchy shared by every module of the workbench."""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class; the CLI maps subclasses onto exit codes."""


class InputError(WorkbenchError):
    """Malformed or inconsistent input (exit code 2)."""


class ParseError(InputError):
    def __init__(self, message: str, span=None):
        self.span = span
        if span is not None:
            message = f"{span}: {message}"
        super().__init__(message)


class UnknownSymbol(InputError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown symbol {name!r}")


class UnboundVariable(InputError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class NotHorn(InputError):
    def __init__(self, clause, index: int | None = None):
        self.clause = clause
        self.index = index
        where = "" if index is None else f" #{index + 1}"
        super().__init__(f"not Horn: clause{where} {clause}")


class LimitExceeded(WorkbenchError):
    """A resource cap was hit (exit code 3)."""

    def __init__(self, message: str, required=None, limit=None):
        self.required = required
        self.limit = limit
        super().__init__(message)


class NoOptimum(WorkbenchError):
    """Raised by a direct solver when the instance has no optimal solution."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"no-optimum({reason})")


class InternalConsistencyError(WorkbenchError):
    """An implied identity failed to hold; indicates an arithmetic bug."""
