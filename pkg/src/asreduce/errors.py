"""Exception types shared across the package."""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed textual input: an expression, an equation file, or a
    trace document.  Carries the offending line/column when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if col is not None:
            loc.append(f"col {col}")
        super().__init__(f"{', '.join(loc)}: {message}" if loc else message)

    def at_line(self, line: int) -> "ParseError":
        """Copy of this error pinned to a file line (keeps the column)."""
        return ParseError(self.message, line=line, col=self.col)


class PreconditionError(ValueError):
    """A caller violated a documented precondition."""


class InternalInvariantError(RuntimeError):
    """A state that the algorithm's invariants rule out was reached;
    this always indicates a bug, never bad input.  When raised during a
    reduction, ``partial`` holds the passes executed so far."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
