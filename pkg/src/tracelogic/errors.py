"""Exception hierarchy shared by all modules.

Each exception carries the CLI exit code it maps to, so the command-line
front end never has to know which module raised.
"""


class TraceLogicError(Exception):
    exit_code = 1


class InvalidArgument(TraceLogicError, ValueError):
    exit_code = 5


class ParseError(TraceLogicError, ValueError):
    """Malformed formula text.

    ``position`` is a 0-based character offset into the source and
    ``expected`` the set of token kinds that would have been accepted.
    """

    exit_code = 2

    def __init__(self, message, position=None, expected=()):
        self.position = position
        self.expected = tuple(sorted(set(expected)))
        detail = message
        if position is not None:
            detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class ScaleNegative(ParseError):
    pass


class FreeVariableError(TraceLogicError, ValueError):
    exit_code = 3


class UnsupportedError(TraceLogicError):
    exit_code = 3


class BudgetExceeded(TraceLogicError):
    exit_code = 4

    def __init__(self, cardinality, budget):
        self.cardinality = cardinality
        self.budget = budget
        super().__init__(f"required cardinality {cardinality} exceeds budget {budget}")


class ValidationError(TraceLogicError, ValueError):
    exit_code = 5


class NotHermitian(ValidationError):
    pass


class UnboundVariable(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ConfigInvalid(ValidationError):
    pass


class InvalidPVM(ValidationError):
    pass


class TooFar(ValidationError):
    pass
