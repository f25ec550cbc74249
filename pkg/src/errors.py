"""
Exceptions raised by the hopfcheck engine and front end
"""


class HopfcheckError(Exception):
    """Base class for every error the CLI reports with exit code 3"""


# scalars
class ZeroDenominator(HopfcheckError, ValueError):
    pass


class DivisionByZero(HopfcheckError, ZeroDivisionError):
    pass


class PoleAtPoint(HopfcheckError, ValueError):
    pass


class MissingParameter(HopfcheckError, LookupError):
    pass


class FieldMismatch(HopfcheckError, ValueError):
    pass


# free algebra
class AlphabetMismatch(HopfcheckError, ValueError):
    pass


class MissingImage(HopfcheckError, LookupError):
    pass


class BadFactorIndex(HopfcheckError, ValueError):
    pass


# rewriting
class NonOrientable(HopfcheckError, ValueError):
    pass


class BoundTooSmall(HopfcheckError, ValueError):
    pass


class StepBudgetExceeded(HopfcheckError, RuntimeError):
    pass


# oracle
class DegreeOverflow(HopfcheckError, ValueError):
    pass


# presentations and maps
class PresentationError(HopfcheckError, ValueError):
    pass


class NonInvertibleMap(HopfcheckError, ValueError):
    pass


class UnknownBuiltin(HopfcheckError, LookupError):
    pass


# DSL
class ParseError(HopfcheckError, ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<string>"):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line:
            return f"{self.source}:{self.line}:{self.column}: {self.message}"
        return f"{self.source}: {self.message}"


class UndeclaredSymbol(ParseError):
    pass


class DuplicateGenerator(ParseError):
    pass
