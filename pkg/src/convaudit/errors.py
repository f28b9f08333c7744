"""Typed errors raised across the toolkit.

Every error names the offending element (node id, value name, file path,
CSV line) so callers can report without re-parsing the input.
"""

from __future__ import annotations


class AuditError(Exception):
    """Base class for all toolkit errors."""


class MalformedInput(AuditError):
    """Input bytes or structure violate the format contract."""


class DuplicateId(AuditError):
    def __init__(self, element: str, detail: str = "") -> None:
        self.element = element
        suffix = f" ({detail})" if detail else ""
        super().__init__(f"duplicate identifier: {element!r}{suffix}")


class DanglingReference(AuditError):
    def __init__(self, element: str, detail: str = "") -> None:
        self.element = element
        suffix = f" ({detail})" if detail else ""
        super().__init__(f"dangling reference: {element!r}{suffix}")


class CycleDetected(AuditError):
    def __init__(self, element: str) -> None:
        self.element = element
        super().__init__(f"cycle through node {element!r}")


class UnsupportedDtype(AuditError):
    def __init__(self, dtype: object) -> None:
        self.dtype = dtype
        super().__init__(f"unsupported dtype: {dtype!r}")


class DumpUnreadable(AuditError):
    def __init__(self, path: str, detail: str) -> None:
        self.path = path
        self.detail = detail
        super().__init__(f"unreadable tensor dump {path}: {detail}")


class EmptyInput(AuditError):
    """An operation that needs at least one element received none."""


class InsufficientModels(AuditError):
    def __init__(self, role: str, have: int, need: int) -> None:
        self.role = role
        super().__init__(f"{role} corpus has {have} usable model(s), need {need}")


class PathExplosion(AuditError):
    def __init__(self, model_id: str, budget: int) -> None:
        self.model_id = model_id
        self.budget = budget
        super().__init__(f"model {model_id!r} exceeds the path budget of {budget}")


class UnknownEnumValue(AuditError):
    def __init__(self, line: int, field: str, value: str) -> None:
        self.line = line
        self.field = field
        self.value = value
        super().__init__(f"line {line}: unknown {field} value {value!r}")


class MissingField(AuditError):
    def __init__(self, line: int, field: str) -> None:
        self.line = line
        self.field = field
        super().__init__(f"line {line}: missing required field {field!r}")
