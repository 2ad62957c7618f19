"""
Surface AST produced by the parser and consumed by the elaborator and the
pretty-printer. Every node carries an optional SourceSpan that is ignored by
equality, so two parses of the same program compare equal regardless of layout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from src.core.errors import SourceSpan


def _span():
    return field(default=None, compare=False, repr=False)


# ------------------------- types -------------------------

@dataclass(frozen=True)
class TyUnit:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TyNat:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TyAlias:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TyArrow:
    dom: "SurfaceType"
    cod: "SurfaceType"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TyProd:
    left: "SurfaceType"
    right: "SurfaceType"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TySum:
    left: "SurfaceType"
    right: "SurfaceType"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TyThread:
    payload: "SurfaceType"
    prio: "PrioRef"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TyCmd:
    payload: "SurfaceType"
    prio: "PrioRef"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TyForall:
    var: str
    constraint: Tuple["SLe", ...]
    body: "SurfaceType"
    span: Optional[SourceSpan] = _span()


SurfaceType = Union[TyUnit, TyNat, TyAlias, TyArrow, TyProd, TySum, TyThread, TyCmd, TyForall]


# ------------------------- priorities -------------------------

@dataclass(frozen=True)
class PrioRef:
    """A priority by name; resolved to a variable or a constant during elaboration."""
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SLe:
    lhs: PrioRef
    rhs: PrioRef
    span: Optional[SourceSpan] = _span()


# ------------------------- expressions -------------------------

@dataclass(frozen=True)
class Ident:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class NatLit:
    value: int
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class UnitLit:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class FnExpr:
    var: str
    ty: Optional[SurfaceType]
    body: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ApplyExpr:
    fn: "SurfaceExpr"
    arg: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class PairExpr:
    left: "SurfaceExpr"
    right: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class FstExpr:
    value: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SndExpr:
    value: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class InlExpr:
    value: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class InrExpr:
    value: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SuccExpr:
    value: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class CaseExpr:
    scrutinee: "SurfaceExpr"
    left_var: str
    left: "SurfaceExpr"
    right_var: str
    right: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class IfzExpr:
    value: "SurfaceExpr"
    if_zero: "SurfaceExpr"
    var: str
    if_succ: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class LetExpr:
    decls: Tuple["Decl", ...]
    body: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class CmdExpr:
    prio: PrioRef
    cmd: "SurfaceCmd"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class PrioAppExpr:
    value: "SurfaceExpr"
    prio: PrioRef
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class OutputExpr:
    value: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class InputExpr:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class FixExpr:
    var: str
    ty: SurfaceType
    body: "SurfaceExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AnnotExpr:
    expr: "SurfaceExpr"
    ty: SurfaceType
    span: Optional[SourceSpan] = _span()


SurfaceExpr = Union[Ident, NatLit, UnitLit, FnExpr, ApplyExpr, PairExpr, FstExpr, SndExpr,
                    InlExpr, InrExpr, SuccExpr, CaseExpr, IfzExpr, LetExpr, CmdExpr,
                    PrioAppExpr, OutputExpr, InputExpr, FixExpr, AnnotExpr]


# ------------------------- commands -------------------------

@dataclass(frozen=True)
class DoInstr:
    expr: SurfaceExpr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SyncInstr:
    expr: SurfaceExpr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SpawnInstr:
    prio: PrioRef
    body: "SurfaceCmd"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class RetInstr:
    expr: SurfaceExpr
    span: Optional[SourceSpan] = _span()


Instr = Union[DoInstr, SyncInstr, SpawnInstr, RetInstr]


@dataclass(frozen=True)
class CmdStep:
    """`var <- instr;`, or `instr;` when var is None."""
    var: Optional[str]
    instr: Instr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SurfaceCmd:
    steps: Tuple[CmdStep, ...]
    last: Instr
    span: Optional[SourceSpan] = _span()


# ------------------------- declarations and programs -------------------------

@dataclass(frozen=True)
class Param:
    name: str
    ty: SurfaceType
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class PrioParam:
    name: str
    constraint: Tuple[SLe, ...]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ValDecl:
    name: str
    ty: Optional[SurfaceType]
    expr: SurfaceExpr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class FunDecl:
    name: str
    params: Tuple[Param, ...]
    result: SurfaceType
    body: SurfaceExpr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class PolyFunDecl:
    prio_params: Tuple[PrioParam, ...]
    name: str
    params: Tuple[Param, ...]
    result: SurfaceType
    body: SurfaceExpr
    span: Optional[SourceSpan] = _span()


Decl = Union[ValDecl, FunDecl, PolyFunDecl]


@dataclass(frozen=True)
class PriorityDecl:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class OrderDecl:
    lo: str
    hi: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TypeDecl:
    name: str
    ty: SurfaceType
    span: Optional[SourceSpan] = _span()


Toplevel = Union[PriorityDecl, OrderDecl, TypeDecl, ValDecl, FunDecl, PolyFunDecl]


@dataclass(frozen=True)
class Program:
    toplevels: Tuple[Toplevel, ...]
    main: Optional[SurfaceCmd]
    span: Optional[SourceSpan] = _span()
