"""Exception hierarchy shared by all modules."""


class CayleyKitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CayleyKitError):
    """Malformed input file or literal; carries line/column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {column})" if column is not None else ")")
        super().__init__(message + loc)


class PreconditionError(CayleyKitError):
    """An operation was called outside its documented preconditions."""


class BudgetError(CayleyKitError):
    """A size or move budget was exhausted; partial progress is reported."""

    def __init__(self, message, reached=None):
        self.reached = reached
        if reached is not None:
            message = f"{message} (reached {reached})"
        super().__init__(message)


class WindowError(CayleyKitError):
    """The requested computation does not fit in the built ball window."""


class OracleError(CayleyKitError):
    """A word-problem or membership oracle was missing, inconclusive, or unsound."""
