"""
Exception hierarchy for pbsift

Every error raised by the library derives from PbsiftError. Most also derive
from the matching builtin so callers can catch ValueError/RuntimeError.
"""

from typing import Any, Optional


class PbsiftError(Exception):
    """Base class for all pbsift errors"""


class ConfigError(PbsiftError, ValueError):
    """Invalid configuration file or value"""


class LiteralNotPresentError(PbsiftError, KeyError):
    """A rule was asked to act on a literal the constraint does not contain"""

    def __init__(self, literal: Any, constraint: Any = None) -> None:
        self.literal = literal
        self.constraint = constraint
        super().__init__(literal)

    def __str__(self) -> str:
        if self.constraint is None:
            return f"literal {self.literal} does not occur in the constraint"
        return f"literal {self.literal} does not occur in {self.constraint}"


class InvalidDivisorError(PbsiftError, ValueError):
    """Division by an integer smaller than 1"""


class InvalidMultiplierError(PbsiftError, ValueError):
    """Multiplication by an integer smaller than 1"""


class PivotNotOpposedError(PbsiftError, ValueError):
    """Cancellation pivot does not occur with opposite signs in both operands"""


class InconsistentTermError(PbsiftError, ValueError):
    """A conditioning term contains a literal together with its negation"""


class IncompleteAssignmentError(PbsiftError, ValueError):
    """Evaluation under an assignment that leaves a variable unassigned"""


class OracleCapacityExceededError(PbsiftError, RuntimeError):
    """The exact subset-sum table would exceed the configured budget"""


class InternalInvariantError(PbsiftError, RuntimeError):
    """A solver self-check failed"""


class InvalidInstanceError(PbsiftError, ValueError):
    """Invalid arguments for an instance generator"""


class OpbParseError(PbsiftError, ValueError):
    """Malformed OPB input"""

    def __init__(self, message: str, line: int, column: Optional[int] = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        super().__init__(message)

    def __str__(self) -> str:
        if self.column is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, column {self.column}: {self.message}"


class TraceFormatError(PbsiftError, ValueError):
    """Malformed derivation trace record"""

    def __init__(self, message: str, line: int) -> None:
        self.message = message
        self.line = line
        super().__init__(message)

    def __str__(self) -> str:
        return f"trace line {self.line}: {self.message}"


class ReplayMismatchError(PbsiftError, RuntimeError):
    """Replaying a trace step did not reproduce the recorded constraint"""

    def __init__(self, step: int, expected: Any, actual: Any) -> None:
        self.step = step
        self.expected = expected
        self.actual = actual
        super().__init__(step)

    def __str__(self) -> str:
        return f"step {self.step}: recorded {self.expected} but replay gives {self.actual}"
