"""Actions emitted by command steps: silent, synchronization and return."""
from dataclasses import dataclass
from typing import Union

from src.core.terms import Expr


@dataclass(frozen=True)
class Silent:
    def __str__(self) -> str:
        return "ε"


@dataclass(frozen=True)
class SyncFrom:
    """b?v: the stepping thread received v from thread b."""
    thread: str
    value: Expr

    def __str__(self) -> str:
        return f"{self.thread}?"


@dataclass(frozen=True)
class RetOf:
    """b!v: thread b returned v."""
    thread: str
    value: Expr

    def __str__(self) -> str:
        return f"{self.thread}!"


Action = Union[Silent, SyncFrom, RetOf]
SILENT = Silent()
