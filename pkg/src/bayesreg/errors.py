"""Exception hierarchy.

``ValidationError`` subclasses signal bad input (CLI exit code 2);
``NumericalError`` subclasses signal numerical failure (exit code 4).
"""

from __future__ import annotations


class BayesRegError(Exception):
    pass


class ValidationError(BayesRegError, ValueError):
    pass


class NumericalError(BayesRegError, ArithmeticError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ConstantColumn(ValidationError):
    def __init__(self, index: int):
        super().__init__(f"column {index} is constant (sd = 0)")
        self.index = index


class NegativePenalty(ValidationError):
    pass


class ZeroGradient(ValidationError):
    pass


class UndefinedAtZero(ValidationError):
    pass


class DimensionTooSmall(ValidationError):
    pass


class ZeroVector(ValidationError):
    pass


class InsufficientSamples(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


class RaggedRows(ParseError):
    pass


class NonNumericCell(ParseError):
    pass


class SingularDesign(NumericalError):
    pass


class NumericalBreakdown(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass
