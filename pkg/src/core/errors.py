"""
Error types shared by every stage of the toolchain.

Each error carries a stable diagnostic code and, where the failure can be traced
back to source text, a SourceSpan. The CLI turns these into diagnostics and exit
codes; library code only raises them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Optional


@dataclass(frozen=True)
class SourceSpan:
    """1-based, inclusive source region."""
    start_line: int
    start_col: int
    end_line: int
    end_col: int
    source: str = "<input>"

    def __post_init__(self):
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span starts after it ends: {self}")

    def __str__(self) -> str:
        return f"{self.start_line}.{self.start_col}-{self.end_line}.{self.end_col}"

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        start = min((self.start_line, self.start_col), (other.start_line, other.start_col))
        end = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return SourceSpan(start[0], start[1], end[0], end[1], self.source)


class PrimlError(Exception):
    """Base class of all toolchain errors."""
    code = "E-INTERNAL"
    exit_code = 1

    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        return self.message


# ------------------------- front end -------------------------

class PrimlSyntaxError(PrimlError):
    code = "E-SYNTAX"

    def __init__(self, message: str, span: Optional[SourceSpan] = None,
                 expected: FrozenSet[str] = frozenset()):
        super().__init__(message, span)
        self.expected = frozenset(expected)


class DuplicatePriority(PrimlError):
    code = "E-DUP-PRIO"


class UnknownPriority(PrimlError):
    code = "E-UNKNOWN-PRIO"


class CycleDetected(PrimlError):
    code = "E-CYCLE"

    def __init__(self, lo: str, hi: str, span: Optional[SourceSpan] = None):
        super().__init__(f"ordering {lo} < {hi} would create a cycle in the priority order", span)
        self.lo = lo
        self.hi = hi


class TypeMismatch(PrimlError):
    code = "E-TYPE"

    def __init__(self, message: str, span: Optional[SourceSpan] = None,
                 expected: Optional[str] = None, found: Optional[str] = None):
        if expected is not None and found is not None:
            message = f"{message}: expected {expected}, found {found}"
        super().__init__(message, span)
        self.expected = expected
        self.found = found


class UnboundVariable(PrimlError):
    code = "E-UNBOUND"


class UnknownThread(PrimlError):
    code = "E-THREAD"
    exit_code = 3


class DuplicateThread(PrimlError):
    code = "E-DUP-THREAD"
    exit_code = 3


class ConstraintViolation(PrimlError):
    """An entailment premise failed. The message format is fixed."""
    code = "E-CONSTRAINT"

    def __init__(self, lhs: str, rhs: str, span: Optional[SourceSpan] = None):
        where = f" at {span}" if span is not None else ""
        super().__init__(f"constraint violated{where}: {lhs} <= {rhs}", span)
        self.lhs = lhs
        self.rhs = rhs


class PriorityInversion(ConstraintViolation):
    code = "E-PRIO-INV"


# ------------------------- runtime -------------------------

class Stuck(PrimlError):
    code = "E-STUCK"
    exit_code = 3


class Deadlock(PrimlError):
    code = "E-DEADLOCK"
    exit_code = 3


class AuditFailure(PrimlError):
    code = "E-AUDIT"
    exit_code = 3


class FuelExhausted(PrimlError):
    code = "E-FUEL"
    exit_code = 4


class Blocked(Exception):
    """Raised by step_cmd when a sync targets a thread that has not returned."""

    def __init__(self, thread: str):
        super().__init__(f"blocked on {thread}")
        self.thread = thread


# ------------------------- graphs and schedules -------------------------

class NameClash(PrimlError):
    code = "E-NAME-CLASH"


class EmptyThread(PrimlError):
    code = "E-EMPTY"
    exit_code = 2


class ThreadNotInGraph(PrimlError):
    code = "E-NO-THREAD"
    exit_code = 2


class NotWellFormed(PrimlError):
    code = "E-NOT-WF"
    exit_code = 2


class ZeroMass(PrimlError):
    code = "E-ZERO-MASS"
    exit_code = 2


class TooLarge(PrimlError):
    code = "E-TOO-LARGE"
    exit_code = 2


class CriterionError(PrimlError):
    code = "E-CRITERION"
    exit_code = 2


class DagFormatError(PrimlError):
    code = "E-DAG-FORMAT"
    exit_code = 2

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
