"""Exception types and the verdict record shared by all checkers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class TopogreyError(Exception):
    """Base class; ``witness`` holds the offending data when there is one."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class CarrierMismatch(TopogreyError):
    pass


class PreconditionError(TopogreyError):
    pass


class InsufficientBasis(TopogreyError):
    pass


class BudgetExhausted(TopogreyError):
    pass


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def accept(cls) -> "Verdict":
        return cls(True)

    @classmethod
    def reject(cls, reason: str, witness: Any) -> "Verdict":
        return cls(False, reason, witness)

    def raise_if_failed(self, exc: type = PreconditionError) -> None:
        if not self.ok:
            raise exc(self.reason, self.witness)
