"""
Exception hierarchy shared by every cubeplan module.
"""

from typing import Any, Optional


class CubePlanError(Exception):
    """Base class for all cubeplan errors."""


class ResourceGuardError(CubePlanError):
    """An enumeration or construction would exceed the configured ceiling."""

    def __init__(self, what: str, limit: int):
        super().__init__(f"{what} exceeds the resource limit of {limit}; "
                         f"raise CUBEPLAN_RESOURCE_LIMIT or pass a larger limit")
        self.what = what
        self.limit = limit


class PipError(CubePlanError, ValueError):
    """Malformed poset with inconsistent pairs."""


class UnknownElementError(PipError):
    def __init__(self, names):
        names = sorted(names)
        super().__init__(f"unknown element(s): {', '.join(names)}")
        self.names = names


class InvalidIdealError(PipError):
    """A set that was required to be a consistent order ideal is not one."""


class ComplexError(CubePlanError, ValueError):
    """Malformed cubical complex."""


class DisconnectedError(ComplexError):
    pass


class NotCat0Error(ComplexError):
    def __init__(self, refutation: Any):
        super().__init__(f"not CAT(0): {refutation.kind}: {refutation.message}")
        self.refutation = refutation


class InvalidStateError(CubePlanError, ValueError):
    """Bad arm specification or direction word."""


class InvariantViolation(CubePlanError, RuntimeError):
    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness
