"""Exception hierarchy for cogarith."""


class CogArithError(Exception):
    """Base class for every error raised by this package."""


# -- parsing ---------------------------------------------------------------

class ParseError(CogArithError, ValueError):
    """Input text is not a two-operand problem.

    ``token`` is the offending text (empty when input ran out) and
    ``position`` its zero-based character offset.
    """

    def __init__(self, message, token="", position=0):
        super().__init__(f"{message} (token {token!r} at position {position})")
        self.token = token
        self.position = position


class EmptyInput(ParseError):
    pass


class MalformedExpression(ParseError):
    pass


class UnknownOperator(ParseError):
    pass


class OperandOverflow(ParseError):
    pass


# -- solving ---------------------------------------------------------------

class DomainError(CogArithError, ArithmeticError):
    """The problem has no non-negative integer answer."""


class DivisionByZero(DomainError, ZeroDivisionError):
    pass


class NegativeResult(DomainError):
    pass


# -- activation / fact library -------------------------------------------

class BadRange(CogArithError, ValueError):
    pass


class UnknownKey(CogArithError, KeyError):
    pass


class MalformedRow(CogArithError, ValueError):
    def __init__(self, message, row, column):
        super().__init__(f"{message} (row {row}, column {column})")
        self.row = row
        self.column = column


class InconsistentResult(MalformedRow):
    pass


class IoFailure(CogArithError, OSError):
    pass
