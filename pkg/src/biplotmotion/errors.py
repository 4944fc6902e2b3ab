"""Exception hierarchy.

Every error carries the process exit code the CLI reports for it and an
optional ``flag`` naming the command-line option that led to it.
"""

from __future__ import annotations


class BiplotMotionError(Exception):
    exit_code = 1

    def __init__(self, message: str, *, flag: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.flag = flag

    def __str__(self) -> str:
        if self.flag:
            return f"{self.message} (check {self.flag})"
        return self.message


class ConfigError(BiplotMotionError, ValueError):
    """Invalid or contradictory options."""

    exit_code = 2


class DataError(BiplotMotionError, ValueError):
    """Input data violates a structural requirement."""

    exit_code = 3


class MissingColumnError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, *, row: int | None = None, column: str | None = None,
                 flag: str | None = None) -> None:
        super().__init__(message, flag=flag)
        self.row = row
        self.column = column


class CardinalityError(DataError):
    pass


class UndersizedSliceError(DataError):
    def __init__(self, message: str, *, level: str | None = None, flag: str | None = None) -> None:
        super().__init__(message, flag=flag)
        self.level = level


class BalanceError(DataError):
    def __init__(self, message: str, *, levels: list[str] | None = None,
                 flag: str | None = None) -> None:
        super().__init__(message, flag=flag)
        self.levels = levels or []


class UnknownLevelError(DataError):
    pass


class ShapeError(DataError):
    pass


class NumericError(BiplotMotionError, ArithmeticError):
    """Degenerate numerics: zero variance, rank deficiency and the like."""

    exit_code = 4


class DegenerateColumnError(NumericError):
    def __init__(self, message: str, *, column: str | None = None, flag: str | None = None) -> None:
        super().__init__(message, flag=flag)
        self.column = column


class RankDeficiencyError(NumericError):
    pass


class DegenerateConfigurationError(NumericError):
    pass


class RenderError(NumericError):
    pass


class OutputError(BiplotMotionError, OSError):
    exit_code = 5
