"""Structured error hierarchy shared by the library and the CLI."""

from __future__ import annotations

from typing import Any, ClassVar, Optional


class LogDecompError(Exception):
    """Base error carrying a machine-readable type, payload data and a CLI exit code."""

    exit_code: ClassVar[int] = 1

    def __init__(self, error_type: str, message: str, *, recoverable: bool = False, data: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.error_type = error_type
        self.recoverable = recoverable
        self.data = data or {}

    def to_payload(self) -> dict[str, Any]:
        return {
            "error": {
                "type": self.error_type,
                "message": str(self),
                "recoverable": self.recoverable,
                "data": self.data,
            }
        }


class SchemaError(LogDecompError):
    """Input document does not match its JSON schema."""

    exit_code = 2

    def __init__(self, message: str, *, data: Optional[dict[str, Any]] = None):
        super().__init__("SCHEMA", message, data=data)


class StructuralError(LogDecompError):
    """Input is well-formed JSON but mathematically malformed (bad face map, wrong chart, ...)."""

    exit_code = 2

    def __init__(self, message: str, *, data: Optional[dict[str, Any]] = None):
        super().__init__("STRUCTURAL", message, data=data)


class ArgumentError(StructuralError):
    """An operation was called outside its precondition (non-ray cell, non-rigid type, ...)."""

    def __init__(self, message: str, *, data: Optional[dict[str, Any]] = None):
        super().__init__(message, data=data)
        self.error_type = "ARGUMENT"


class ContractionError(StructuralError):
    """The contracted vertices have no admissible common face."""

    def __init__(self, message: str, *, data: Optional[dict[str, Any]] = None):
        super().__init__(message, data=data)
        self.error_type = "CONTRACTION"


class CapabilityError(LogDecompError):
    """Computation exceeds a configured capability (e.g. the Hilbert-basis rank cap)."""

    exit_code = 3

    def __init__(self, message: str, *, data: Optional[dict[str, Any]] = None):
        super().__init__("CAPABILITY", message, recoverable=True, data=data)


class VerdictRefused(LogDecompError):
    """A count cannot be emitted because a required geometric input is undecided."""

    exit_code = 4

    def __init__(self, message: str, *, data: Optional[dict[str, Any]] = None):
        super().__init__("VERDICT_REFUSED", message, recoverable=True, data=data)


class InternalError(LogDecompError):
    """An arithmetic invariant broke inside a computation; wraps the original exception."""

    exit_code = 5

    def __init__(self, message: str, *, data: Optional[dict[str, Any]] = None):
        super().__init__("INTERNAL", message, data=data)
