"""
Type checking for the core calculus: expressions, commands at a priority,
thread pools and actions.

All binders are annotated after elaboration, so checking is syntax-directed.
Types are compared up to renaming of bound priority variables.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Mapping, NamedTuple, Optional

from src.core import terms as T
from src.core.errors import (ConstraintViolation, DuplicateThread, PriorityInversion, SourceSpan,
                             TypeMismatch, UnboundVariable, UnknownPriority, UnknownThread)
from src.core.names import fresh_name
from src.core.pretty import show_expr, show_prio, show_type
from src.core.priorities import EntailContext, PriorityOrder, entails
from src.core.subst import alpha_equal, free_vars, rename, subst_prio
from src.core.actions import RetOf, Silent, SyncFrom

if TYPE_CHECKING:
    from src.runtime.pool import ThreadPool

logger = logging.getLogger(__name__)


class SigEntry(NamedTuple):
    ty: T.Type
    prio: T.Priority


Signature = Mapping[str, SigEntry]


@dataclass(frozen=True)
class TypeContext:
    """Value variables with their types, plus the priority part of the context."""
    values: Mapping[str, T.Type] = field(default_factory=dict)
    entail: EntailContext = field(default_factory=EntailContext)

    def bind(self, name: str, ty: T.Type) -> "TypeContext":
        values = dict(self.values)
        values[name] = ty
        return TypeContext(values, self.entail)

    def bind_prio(self, var: str, constraint: Optional[T.Constraint] = None) -> "TypeContext":
        return TypeContext(self.values, self.entail.extend(var, constraint))


EMPTY_CONTEXT = TypeContext()


# ------------------------- well-formedness -------------------------

def check_prio(store: PriorityOrder, ctx: TypeContext, p: T.Priority,
               span: Optional[SourceSpan] = None) -> None:
    if isinstance(p, T.PConst):
        if p.name not in store:
            raise UnknownPriority(f"unknown priority {p.name}", span)
    elif p.name not in ctx.entail.prio_vars:
        raise UnboundVariable(f"unbound priority variable {p.name}", span)


def check_type(store: PriorityOrder, ctx: TypeContext, ty: T.Type,
               span: Optional[SourceSpan] = None) -> None:
    """Every priority in ty is declared or bound."""
    if isinstance(ty, (T.UnitT, T.NatT)):
        return
    if isinstance(ty, (T.Arrow,)):
        check_type(store, ctx, ty.dom, span)
        check_type(store, ctx, ty.cod, span)
    elif isinstance(ty, (T.Prod, T.Sum)):
        check_type(store, ctx, ty.left, span)
        check_type(store, ctx, ty.right, span)
    elif isinstance(ty, (T.ThreadT, T.CmdT)):
        check_prio(store, ctx, ty.prio, span)
        check_type(store, ctx, ty.payload, span)
    elif isinstance(ty, T.Forall):
        inner = ctx.bind_prio(ty.var, ty.constraint)
        for c in ty.constraint.conjuncts:
            check_prio(store, inner, c.lhs, span)
            check_prio(store, inner, c.rhs, span)
        check_type(store, inner, ty.body, span)
    else:
        raise TypeError(f"not a type: {ty!r}")


def _expect(expected: T.Type, found: T.Type, what: str, span: Optional[SourceSpan] = None) -> None:
    if not alpha_equal(expected, found):
        raise TypeMismatch(what, span, show_type(expected), show_type(found))


def _fresh_prio_binder(ctx: TypeContext, var: str, constraint: T.Constraint, body):
    """Rename a priority binder that would shadow a variable already in scope."""
    if var not in ctx.entail.prio_vars:
        return var, constraint, body
    avoid = set(ctx.entail.prio_vars) | free_vars(constraint, T.PRIO) | free_vars(body, T.PRIO)
    fresh = fresh_name(var, avoid)
    return fresh, rename(constraint, T.PRIO, var, fresh), rename(body, T.PRIO, var, fresh)


def require_entails(store: PriorityOrder, ctx: TypeContext, goal: T.Constraint,
                    span: Optional[SourceSpan] = None, error=ConstraintViolation) -> None:
    """Raise error naming the first conjunct of goal that ctx does not entail."""
    for conj in goal.conjuncts:
        if not entails(store, ctx.entail, T.Constraint((conj,))):
            raise error(show_prio(conj.lhs), show_prio(conj.rhs), span)


# ------------------------- expressions -------------------------

def type_expr(store: PriorityOrder, sig: Signature, ctx: TypeContext, e: T.Expr) -> T.Type:
    # let-chains are walked in a loop to keep recursion shallow
    while isinstance(e, T.Let):
        ctx = ctx.bind(e.var, type_expr(store, sig, ctx, e.bound))
        e = e.body

    if isinstance(e, T.Var):
        try:
            return ctx.values[e.name]
        except KeyError:
            raise UnboundVariable(f"unbound variable {e.name}") from None
    if isinstance(e, T.UnitV):
        return T.UNIT
    if isinstance(e, T.Num):
        return T.NAT
    if isinstance(e, T.Succ):
        _expect(T.NAT, type_expr(store, sig, ctx, e.value), "succ of a non-numeral")
        return T.NAT
    if isinstance(e, T.Lam):
        check_type(store, ctx, e.ty)
        return T.Arrow(e.ty, type_expr(store, sig, ctx.bind(e.var, e.ty), e.body))
    if isinstance(e, (T.PairV, T.MkPair)):
        return T.Prod(type_expr(store, sig, ctx, e.left), type_expr(store, sig, ctx, e.right))
    if isinstance(e, (T.InlV, T.MkInl, T.InrV, T.MkInr)):
        check_type(store, ctx, e.ty)
        side = e.ty.left if isinstance(e, (T.InlV, T.MkInl)) else e.ty.right
        _expect(side, type_expr(store, sig, ctx, e.value), "injection payload")
        return e.ty
    if isinstance(e, T.Tid):
        entry = sig.get(e.name)
        if entry is None:
            raise UnknownThread(f"thread {e.name} is not in the signature")
        return T.ThreadT(entry.ty, entry.prio)
    if isinstance(e, T.CmdV):
        check_prio(store, ctx, e.prio)
        return T.CmdT(type_cmd(store, sig, ctx, e.cmd, e.prio), e.prio)
    if isinstance(e, T.PLam):
        var, constraint, body = _fresh_prio_binder(ctx, e.var, e.constraint, e.body)
        inner = ctx.bind_prio(var, constraint)
        for c in constraint.conjuncts:
            check_prio(store, inner, c.lhs)
            check_prio(store, inner, c.rhs)
        return T.Forall(var, constraint, type_expr(store, sig, inner, body))
    if isinstance(e, T.Ifz):
        _expect(T.NAT, type_expr(store, sig, ctx, e.value), "ifz scrutinee")
        zero = type_expr(store, sig, ctx, e.if_zero)
        _expect(zero, type_expr(store, sig, ctx.bind(e.var, T.NAT), e.if_succ), "ifz branches")
        return zero
    if isinstance(e, T.App):
        fn_ty = type_expr(store, sig, ctx, e.fn)
        if not isinstance(fn_ty, T.Arrow):
            raise TypeMismatch("application of a non-function", expected="a function type", found=show_type(fn_ty))
        _expect(fn_ty.dom, type_expr(store, sig, ctx, e.arg), "function argument")
        return fn_ty.cod
    if isinstance(e, (T.Fst, T.Snd)):
        pair_ty = type_expr(store, sig, ctx, e.value)
        if not isinstance(pair_ty, T.Prod):
            raise TypeMismatch("projection from a non-pair", expected="a product type", found=show_type(pair_ty))
        return pair_ty.left if isinstance(e, T.Fst) else pair_ty.right
    if isinstance(e, T.Case):
        sum_ty = type_expr(store, sig, ctx, e.value)
        if not isinstance(sum_ty, T.Sum):
            raise TypeMismatch("case on a non-sum", expected="a sum type", found=show_type(sum_ty))
        left = type_expr(store, sig, ctx.bind(e.left_var, sum_ty.left), e.left)
        _expect(left, type_expr(store, sig, ctx.bind(e.right_var, sum_ty.right), e.right), "case branches")
        return left
    if isinstance(e, T.Output):
        _expect(T.NAT, type_expr(store, sig, ctx, e.value), "output argument")
        return T.UNIT
    if isinstance(e, T.Input):
        return T.NAT
    if isinstance(e, T.PrApp):
        poly = type_expr(store, sig, ctx, e.value)
        if not isinstance(poly, T.Forall):
            raise TypeMismatch("priority application of a non-polymorphic value",
                               expected="a forall type", found=show_type(poly))
        check_prio(store, ctx, e.prio)
        require_entails(store, ctx, subst_prio(e.prio, poly.var, poly.constraint))
        return subst_prio(e.prio, poly.var, poly.body)
    if isinstance(e, T.Fix):
        check_type(store, ctx, e.ty)
        _expect(e.ty, type_expr(store, sig, ctx.bind(e.var, e.ty), e.body), f"fixed point {e.var}")
        return e.ty
    raise TypeError(f"not an expression: {e!r}")


# ------------------------- commands -------------------------

def type_cmd(store: PriorityOrder, sig: Signature, ctx: TypeContext, m: T.Cmd, at: T.Priority) -> T.Type:
    """The return type of m run at priority `at`."""
    while isinstance(m, T.Bind):
        encap = type_expr(store, sig, ctx, m.expr)
        if not isinstance(encap, T.CmdT):
            raise TypeMismatch("bind of a non-command", expected=f"a cmd[{show_prio(at)}] type",
                               found=show_type(encap))
        if encap.prio != at:
            raise TypeMismatch("bind of a command at another priority",
                               expected=f"cmd[{show_prio(at)}]", found=f"cmd[{show_prio(encap.prio)}]")
        ctx = ctx.bind(m.var, encap.payload)
        m = m.rest

    if isinstance(m, T.Spawn):
        check_prio(store, ctx, m.prio)
        check_type(store, ctx, m.ty)
        _expect(m.ty, type_cmd(store, sig, ctx, m.body, m.prio), "spawned command")
        return T.ThreadT(m.ty, m.prio)
    if isinstance(m, T.Sync):
        handle = type_expr(store, sig, ctx, m.expr)
        if not isinstance(handle, T.ThreadT):
            raise TypeMismatch("sync on a non-thread", expected="a thread type", found=show_type(handle))
        require_entails(store, ctx, T.le(at, handle.prio), error=PriorityInversion)
        return handle.payload
    if isinstance(m, T.Ret):
        return type_expr(store, sig, ctx, m.expr)
    raise TypeError(f"not a command: {m!r}")


def check_program(store: PriorityOrder, m: T.Cmd) -> T.Type:
    """Type a closed command at bot with an empty signature."""
    return type_cmd(store, {}, EMPTY_CONTEXT, m, T.BOT)


# ------------------------- thread pools and actions -------------------------

def type_threadpool(store: PriorityOrder, ambient: Signature, pool: "ThreadPool") -> Dict[str, SigEntry]:
    """
    Check every thread of the pool (running and retired) against its declared
    entry, with all of the pool's threads visible to each other.
    """
    clash = set(ambient) & set(pool.sig)
    if clash:
        raise DuplicateThread(f"thread {sorted(clash)[0]} is bound twice")
    full: Dict[str, SigEntry] = {**ambient, **pool.sig}
    for name, (prio, cmd) in pool.threads.items():
        entry = full[name]
        if entry.prio != prio:
            raise TypeMismatch(f"thread {name} runs at the wrong priority",
                               expected=show_prio(entry.prio), found=show_prio(prio))
        _expect(entry.ty, type_cmd(store, full, EMPTY_CONTEXT, cmd, prio), f"thread {name}")
    for name, value in pool.retained.items():
        if not T.value_check(value, full):
            raise TypeMismatch(f"retained result of thread {name} is not a value: {show_expr(value)}")
        _expect(full[name].ty, type_expr(store, full, EMPTY_CONTEXT, value), f"result of thread {name}")
    return dict(pool.sig)


def type_action(store: PriorityOrder, sig: Signature, action) -> None:
    if isinstance(action, Silent):
        return
    if isinstance(action, (SyncFrom, RetOf)):
        entry = sig.get(action.thread)
        if entry is None:
            raise UnknownThread(f"thread {action.thread} is not in the signature")
        _expect(entry.ty, type_expr(store, sig, EMPTY_CONTEXT, action.value), f"value of thread {action.thread}")
        return
    raise TypeError(f"not an action: {action!r}")
