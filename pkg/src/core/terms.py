"""
Abstract syntax of the core calculus: priorities, constraints, types,
expressions (values included) and commands.

All nodes are frozen dataclasses. Binding structure is declared per class in
BINDS, which maps a child field to (kind, name of the field holding the bound
identifier); the generic traversals in src.core.subst read it.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from functools import lru_cache
from typing import ClassVar, Dict, FrozenSet, Iterator, Mapping, Tuple, Union

VAL = "val"
PRIO = "prio"


class Term:
    """Base class of every core node."""
    BINDS: ClassVar[Dict[str, Tuple[str, str]]] = {}


@lru_cache(maxsize=None)
def field_names(cls: type) -> Tuple[str, ...]:
    return tuple(f.name for f in fields(cls))


# ------------------------- priorities and constraints -------------------------

@dataclass(frozen=True)
class PConst(Term):
    name: str


@dataclass(frozen=True)
class PVar(Term):
    name: str


Priority = Union[PConst, PVar]
BOT_NAME = "bot"
BOT = PConst(BOT_NAME)


@dataclass(frozen=True)
class Le(Term):
    """lhs <= rhs"""
    lhs: Priority
    rhs: Priority


@dataclass(frozen=True)
class Constraint(Term):
    conjuncts: Tuple[Le, ...]

    def __post_init__(self):
        if not self.conjuncts:
            raise ValueError("a constraint needs at least one conjunct")


def le(lhs: Priority, rhs: Priority) -> Constraint:
    return Constraint((Le(lhs, rhs),))


# ------------------------- types -------------------------

@dataclass(frozen=True)
class UnitT(Term):
    pass


@dataclass(frozen=True)
class NatT(Term):
    pass


@dataclass(frozen=True)
class Arrow(Term):
    dom: "Type"
    cod: "Type"


@dataclass(frozen=True)
class Prod(Term):
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class Sum(Term):
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class ThreadT(Term):
    payload: "Type"
    prio: Priority


@dataclass(frozen=True)
class CmdT(Term):
    payload: "Type"
    prio: Priority


@dataclass(frozen=True)
class Forall(Term):
    var: str
    constraint: Constraint
    body: "Type"
    BINDS: ClassVar = {"constraint": (PRIO, "var"), "body": (PRIO, "var")}


Type = Union[UnitT, NatT, Arrow, Prod, Sum, ThreadT, CmdT, Forall]
UNIT = UnitT()
NAT = NatT()


# ------------------------- values -------------------------

@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class UnitV(Term):
    pass


@dataclass(frozen=True)
class Num(Term):
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("numerals are naturals")


@dataclass(frozen=True)
class Lam(Term):
    var: str
    ty: Type
    body: "Expr"
    BINDS: ClassVar = {"body": (VAL, "var")}


@dataclass(frozen=True)
class PairV(Term):
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class InlV(Term):
    value: "Expr"
    ty: Sum


@dataclass(frozen=True)
class InrV(Term):
    value: "Expr"
    ty: Sum


@dataclass(frozen=True)
class Tid(Term):
    name: str


@dataclass(frozen=True)
class CmdV(Term):
    """cmd[prio]{cmd}"""
    prio: Priority
    cmd: "Cmd"


@dataclass(frozen=True)
class PLam(Term):
    var: str
    constraint: Constraint
    body: "Expr"
    BINDS: ClassVar = {"constraint": (PRIO, "var"), "body": (PRIO, "var")}


# ------------------------- expressions -------------------------

@dataclass(frozen=True)
class Let(Term):
    var: str
    bound: "Expr"
    body: "Expr"
    BINDS: ClassVar = {"body": (VAL, "var")}


@dataclass(frozen=True)
class Ifz(Term):
    value: "Expr"
    if_zero: "Expr"
    var: str
    if_succ: "Expr"
    BINDS: ClassVar = {"if_succ": (VAL, "var")}


@dataclass(frozen=True)
class App(Term):
    fn: "Expr"
    arg: "Expr"


@dataclass(frozen=True)
class MkPair(Term):
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Fst(Term):
    value: "Expr"


@dataclass(frozen=True)
class Snd(Term):
    value: "Expr"


@dataclass(frozen=True)
class MkInl(Term):
    value: "Expr"
    ty: Sum


@dataclass(frozen=True)
class MkInr(Term):
    value: "Expr"
    ty: Sum


@dataclass(frozen=True)
class Case(Term):
    value: "Expr"
    left_var: str
    left: "Expr"
    right_var: str
    right: "Expr"
    BINDS: ClassVar = {"left": (VAL, "left_var"), "right": (VAL, "right_var")}


@dataclass(frozen=True)
class Output(Term):
    value: "Expr"


@dataclass(frozen=True)
class Input(Term):
    pass


@dataclass(frozen=True)
class PrApp(Term):
    """value[prio]: priority application"""
    value: "Expr"
    prio: Priority


@dataclass(frozen=True)
class Fix(Term):
    var: str
    ty: Type
    body: "Expr"
    BINDS: ClassVar = {"body": (VAL, "var")}


@dataclass(frozen=True)
class Succ(Term):
    value: "Expr"


Expr = Union[Var, UnitV, Num, Lam, PairV, InlV, InrV, Tid, CmdV, PLam,
             Let, Ifz, App, MkPair, Fst, Snd, MkInl, MkInr, Case, Output, Input,
             PrApp, Fix, Succ]


# ------------------------- commands -------------------------

@dataclass(frozen=True)
class Bind(Term):
    expr: Expr
    var: str
    rest: "Cmd"
    BINDS: ClassVar = {"rest": (VAL, "var")}


@dataclass(frozen=True)
class Spawn(Term):
    prio: Priority
    ty: Type
    body: "Cmd"


@dataclass(frozen=True)
class Sync(Term):
    expr: Expr


@dataclass(frozen=True)
class Ret(Term):
    expr: Expr


Cmd = Union[Bind, Spawn, Sync, Ret]

PRIORITY_NODES = (PConst, PVar)
TYPE_NODES = (UnitT, NatT, Arrow, Prod, Sum, ThreadT, CmdT, Forall)
VALUE_NODES = (Var, UnitV, Num, Lam, PairV, InlV, InrV, Tid, CmdV, PLam)
CMD_NODES = (Bind, Spawn, Sync, Ret)


# ------------------------- value predicates -------------------------

def is_value(e: Term) -> bool:
    """The syntactic value class (thread ids are not checked against a signature)."""
    if isinstance(e, (Var, UnitV, Num, Lam, Tid, CmdV, PLam)):
        return True
    if isinstance(e, PairV):
        return is_value(e.left) and is_value(e.right)
    if isinstance(e, (InlV, InrV)):
        return is_value(e.value)
    return False


def thread_names(term: Term) -> Iterator[str]:
    """Every thread id mentioned anywhere inside term."""
    stack = [term]
    while stack:
        node = stack.pop()
        if isinstance(node, Tid):
            yield node.name
        elif isinstance(node, tuple):
            stack.extend(node)
        elif isinstance(node, Term):
            stack.extend(getattr(node, f) for f in field_names(type(node)))


def value_check(e: Term, sig: Union[Mapping[str, object], FrozenSet[str]]) -> bool:
    """v val Σ: e is a value and every thread it names is bound in sig."""
    if not is_value(e):
        return False
    return all(name in sig for name in thread_names(e))
