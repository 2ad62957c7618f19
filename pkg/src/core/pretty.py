"""
Pretty-printer for core terms, in the calculus' own notation.

Used by diagnostics (types and priorities inside error messages) and by
`check --dump-core` / `--dump-types`.
"""
from typing import List

from src.core import terms as T


def show_prio(p: T.Priority) -> str:
    return p.name


def show_constraint(c: T.Constraint) -> str:
    return " /\\ ".join(f"{show_prio(le.lhs)} <= {show_prio(le.rhs)}" for le in c.conjuncts)


# ------------------------- types -------------------------

def _type_atom(t: T.Type) -> str:
    text = show_type(t)
    if isinstance(t, (T.Arrow, T.Prod, T.Sum, T.Forall)):
        return f"({text})"
    return text


def show_type(t: T.Type) -> str:
    if isinstance(t, T.UnitT):
        return "unit"
    if isinstance(t, T.NatT):
        return "nat"
    if isinstance(t, T.Arrow):
        left = f"({show_type(t.dom)})" if isinstance(t.dom, (T.Arrow, T.Forall)) else show_type(t.dom)
        return f"{left} -> {show_type(t.cod)}"
    if isinstance(t, T.Prod):
        return f"{_type_atom(t.left)} * {_type_atom(t.right)}"
    if isinstance(t, T.Sum):
        return f"{_type_atom(t.left)} + {_type_atom(t.right)}"
    if isinstance(t, T.ThreadT):
        return f"{_type_atom(t.payload)} thread[{show_prio(t.prio)}]"
    if isinstance(t, T.CmdT):
        return f"{_type_atom(t.payload)} cmd[{show_prio(t.prio)}]"
    if isinstance(t, T.Forall):
        return f"forall {t.var} : {show_constraint(t.constraint)}. {show_type(t.body)}"
    raise TypeError(f"not a type: {t!r}")


# ------------------------- expressions and commands -------------------------

def _atom(e: T.Term) -> str:
    text = show_expr(e)
    if isinstance(e, (T.Var, T.UnitV, T.Num, T.Tid, T.PairV, T.MkPair, T.Input, T.CmdV)):
        return text
    return f"({text})"


def show_expr(e: T.Term) -> str:
    if isinstance(e, T.Var):
        return e.name
    if isinstance(e, T.UnitV):
        return "<>"
    if isinstance(e, T.Num):
        return str(e.value)
    if isinstance(e, T.Lam):
        return f"λ{e.var}:{_type_atom(e.ty)}. {show_expr(e.body)}"
    if isinstance(e, (T.PairV, T.MkPair)):
        return f"<{show_expr(e.left)}, {show_expr(e.right)}>"
    if isinstance(e, (T.InlV, T.MkInl)):
        return f"inl[{show_type(e.ty)}] {_atom(e.value)}"
    if isinstance(e, (T.InrV, T.MkInr)):
        return f"inr[{show_type(e.ty)}] {_atom(e.value)}"
    if isinstance(e, T.Tid):
        return f"tid[{e.name}]"
    if isinstance(e, T.CmdV):
        return f"cmd[{show_prio(e.prio)}] {{{show_cmd(e.cmd)}}}"
    if isinstance(e, T.PLam):
        return f"Λ{e.var}:{show_constraint(e.constraint)}. {show_expr(e.body)}"
    if isinstance(e, T.Let):
        return f"let {e.var} = {show_expr(e.bound)} in {show_expr(e.body)}"
    if isinstance(e, T.Ifz):
        return f"ifz({show_expr(e.value)}; {show_expr(e.if_zero)}; {e.var}.{show_expr(e.if_succ)})"
    if isinstance(e, T.App):
        return f"{_atom(e.fn)} {_atom(e.arg)}"
    if isinstance(e, T.Fst):
        return f"fst {_atom(e.value)}"
    if isinstance(e, T.Snd):
        return f"snd {_atom(e.value)}"
    if isinstance(e, T.Succ):
        return f"succ {_atom(e.value)}"
    if isinstance(e, T.Case):
        return (f"case({show_expr(e.value)}; {e.left_var}.{show_expr(e.left)}; "
                f"{e.right_var}.{show_expr(e.right)})")
    if isinstance(e, T.Output):
        return f"output {_atom(e.value)}"
    if isinstance(e, T.Input):
        return "input"
    if isinstance(e, T.PrApp):
        return f"{_atom(e.value)}[{show_prio(e.prio)}]"
    if isinstance(e, T.Fix):
        return f"fix {e.var}:{_type_atom(e.ty)} is {show_expr(e.body)}"
    raise TypeError(f"not an expression: {e!r}")


def show_cmd(m: T.Cmd) -> str:
    parts: List[str] = []
    # binds print as a flat sequence rather than nesting to the right
    while isinstance(m, T.Bind):
        parts.append(f"{m.var} <- {show_expr(m.expr)}")
        m = m.rest
    if isinstance(m, T.Spawn):
        parts.append(f"spawn[{show_prio(m.prio)}; {show_type(m.ty)}] {{{show_cmd(m.body)}}}")
    elif isinstance(m, T.Sync):
        parts.append(f"sync {show_expr(m.expr)}")
    elif isinstance(m, T.Ret):
        parts.append(f"ret {show_expr(m.expr)}")
    else:
        raise TypeError(f"not a command: {m!r}")
    return "; ".join(parts)


def show(term: T.Term) -> str:
    """Dispatch on the syntactic class of term."""
    if isinstance(term, T.PRIORITY_NODES):
        return show_prio(term)
    if isinstance(term, T.Constraint):
        return show_constraint(term)
    if isinstance(term, T.TYPE_NODES):
        return show_type(term)
    if isinstance(term, T.CMD_NODES):
        return show_cmd(term)
    return show_expr(term)
