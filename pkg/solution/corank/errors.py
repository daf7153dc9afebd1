"""
Error hierarchy for the corank toolkit

Every failure the toolkit reports deliberately is a ``CorankError`` carrying an
``ErrorKind``. The CLI maps any of them to exit code 2.
"""

from enum import Enum
from typing import Any, Dict, Optional


class ErrorKind(Enum):
    SYNTAX = "syntax"
    VALIDATION = "validation"
    COVERAGE = "coverage"
    NOT_POSTFIXED = "not_postfixed"
    NON_MONOTONE = "non_monotone"
    CERTIFICATE_INVALID = "certificate_invalid"
    VALUE_BELOW_FLOOR = "value_below_floor"
    HORIZON = "horizon"
    USAGE = "usage"


class CorankError(Exception):
    """Base class for toolkit errors"""

    kind: ErrorKind = ErrorKind.VALIDATION

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "message": self.message, "details": self.details}


class ModelSyntaxError(CorankError):
    """Malformed model or certificate text, with a source position"""

    kind = ErrorKind.SYNTAX

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{location}{message}", {"line": line, "column": column})
        self.line = line
        self.column = column


class ModelValidationError(CorankError):
    """Well-formed text describing an ill-formed system or certificate"""

    kind = ErrorKind.VALIDATION

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 state: Optional[str] = None):
        location = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{location}{message}", {"line": line, "column": column, "state": state})
        self.line = line
        self.column = column
        self.state = state


class CoverageError(CorankError):
    kind = ErrorKind.COVERAGE


class NotPostfixedError(CorankError):
    kind = ErrorKind.NOT_POSTFIXED


class NonMonotoneStepError(CorankError):
    kind = ErrorKind.NON_MONOTONE


class CertificateInvalidError(CorankError):
    kind = ErrorKind.CERTIFICATE_INVALID


class ValueBelowFloorError(CorankError):
    kind = ErrorKind.VALUE_BELOW_FLOOR


class HorizonError(CorankError):
    kind = ErrorKind.HORIZON


class UsageError(CorankError):
    kind = ErrorKind.USAGE
