class InvalidInputError(ValueError):
    pass


class NumericalFailureError(RuntimeError):
    pass


class BudgetExceededError(RuntimeError):
    pass


class ParseError(ValueError):
    """Malformed input file. ``line`` is 1-based, or None when not line-specific."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
