"""
Surface pretty-printer. Output re-parses to an equal AST: every compound
subterm is parenthesized, so no precedence knowledge is needed on the way back.
"""
from typing import List

from src.syntax import surface as S


def _constraint(c) -> str:
    return ", ".join(f"{le.lhs.name} <= {le.rhs.name}" for le in c)


def print_type(t) -> str:
    if isinstance(t, S.TyUnit):
        return "unit"
    if isinstance(t, S.TyNat):
        return "nat"
    if isinstance(t, S.TyAlias):
        return t.name
    if isinstance(t, S.TyArrow):
        return f"({print_type(t.dom)} -> {print_type(t.cod)})"
    if isinstance(t, S.TyProd):
        return f"({print_type(t.left)} * {print_type(t.right)})"
    if isinstance(t, S.TySum):
        return f"({print_type(t.left)} + {print_type(t.right)})"
    if isinstance(t, S.TyThread):
        return f"({print_type(t.payload)} thread[{t.prio.name}])"
    if isinstance(t, S.TyCmd):
        return f"({print_type(t.payload)} cmd[{t.prio.name}])"
    if isinstance(t, S.TyForall):
        bound = f" : {_constraint(t.constraint)}" if t.constraint else ""
        return f"(forall {t.var}{bound} . {print_type(t.body)})"
    raise TypeError(f"not a surface type: {t!r}")


def print_expr(e) -> str:
    if isinstance(e, S.Ident):
        return e.name
    if isinstance(e, S.NatLit):
        return str(e.value)
    if isinstance(e, S.UnitLit):
        return "()"
    if isinstance(e, S.FnExpr):
        if e.ty is None:
            return f"(fn {e.var} => {print_expr(e.body)})"
        return f"(fn ({e.var} : {print_type(e.ty)}) => {print_expr(e.body)})"
    if isinstance(e, S.ApplyExpr):
        return f"({print_expr(e.fn)} {print_expr(e.arg)})"
    if isinstance(e, S.PairExpr):
        return f"({print_expr(e.left)}, {print_expr(e.right)})"
    if isinstance(e, S.FstExpr):
        return f"(fst {print_expr(e.value)})"
    if isinstance(e, S.SndExpr):
        return f"(snd {print_expr(e.value)})"
    if isinstance(e, S.InlExpr):
        return f"(inl {print_expr(e.value)})"
    if isinstance(e, S.InrExpr):
        return f"(inr {print_expr(e.value)})"
    if isinstance(e, S.SuccExpr):
        return f"(succ {print_expr(e.value)})"
    if isinstance(e, S.OutputExpr):
        return f"(output {print_expr(e.value)})"
    if isinstance(e, S.CaseExpr):
        return (f"(case {print_expr(e.scrutinee)} of inl {e.left_var} => {print_expr(e.left)}"
                f" | inr {e.right_var} => {print_expr(e.right)})")
    if isinstance(e, S.IfzExpr):
        return (f"(ifz {print_expr(e.value)} then {print_expr(e.if_zero)}"
                f" else {e.var} => {print_expr(e.if_succ)})")
    if isinstance(e, S.LetExpr):
        decls = " ".join(print_decl(d) for d in e.decls)
        return f"let {decls} in {print_expr(e.body)} end"
    if isinstance(e, S.CmdExpr):
        return f"cmd[{e.prio.name}] {{ {print_cmd(e.cmd)} }}"
    if isinstance(e, S.PrioAppExpr):
        return f"([{e.prio.name}] {print_expr(e.value)})"
    if isinstance(e, S.InputExpr):
        return "input"
    if isinstance(e, S.FixExpr):
        return f"(fix {e.var} : {print_type(e.ty)} => {print_expr(e.body)})"
    if isinstance(e, S.AnnotExpr):
        return f"({print_expr(e.expr)} : {print_type(e.ty)})"
    raise TypeError(f"not a surface expression: {e!r}")


def print_instr(i) -> str:
    if isinstance(i, S.DoInstr):
        return f"do {print_expr(i.expr)}"
    if isinstance(i, S.SyncInstr):
        return f"sync {print_expr(i.expr)}"
    if isinstance(i, S.SpawnInstr):
        return f"spawn[{i.prio.name}] {{ {print_cmd(i.body)} }}"
    if isinstance(i, S.RetInstr):
        return f"ret {print_expr(i.expr)}"
    raise TypeError(f"not an instruction: {i!r}")


def print_cmd(m: S.SurfaceCmd) -> str:
    parts: List[str] = []
    for step in m.steps:
        head = f"{step.var} <- " if step.var is not None else ""
        parts.append(f"{head}{print_instr(step.instr)}; ")
    parts.append(print_instr(m.last))
    return "".join(parts)


def _params(params) -> str:
    return "".join(f" ({p.name} : {print_type(p.ty)})" for p in params)


def print_decl(d) -> str:
    if isinstance(d, S.ValDecl):
        ann = f" : {print_type(d.ty)}" if d.ty is not None else ""
        return f"val {d.name}{ann} = {print_expr(d.expr)}"
    if isinstance(d, S.FunDecl):
        return f"fun {d.name}{_params(d.params)} : {print_type(d.result)} = {print_expr(d.body)}"
    if isinstance(d, S.PolyFunDecl):
        binders = ", ".join(
            f"{p.name} : {_constraint(p.constraint)}" if p.constraint else p.name for p in d.prio_params)
        return f"fun[{binders}] {d.name}{_params(d.params)} : {print_type(d.result)} = {print_expr(d.body)}"
    raise TypeError(f"not a declaration: {d!r}")


def print_toplevel(t) -> str:
    if isinstance(t, S.PriorityDecl):
        return f"priority {t.name}"
    if isinstance(t, S.OrderDecl):
        return f"order {t.lo} < {t.hi}"
    if isinstance(t, S.TypeDecl):
        return f"type {t.name} = {print_type(t.ty)}"
    return print_decl(t)


def print_program(p: S.Program) -> str:
    lines = [print_toplevel(t) for t in p.toplevels]
    if p.main is not None:
        lines.append(f"main {{ {print_cmd(p.main)} }}")
    return "\n".join(lines) + "\n"
