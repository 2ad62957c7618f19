"""
Elaboration of PriML surface programs into the core calculus.

Elaboration is typed and is the static semantics of the surface language: it
synthesizes or checks a type for every surface node while producing core terms
in administrative normal form (constructors and eliminators take values, with
intermediate results let-bound). Priority and order declarations are hoisted
into the priority store before any code is elaborated.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from src.core import terms as T
from src.core.errors import (ConstraintViolation, PriorityInversion, SourceSpan, TypeMismatch, UnboundVariable,
                             UnknownPriority)
from src.core.names import NameSupply, ScopedCounter
from src.core.pretty import show_prio, show_type
from src.core.priorities import EntailContext, PriorityOrder, entails
from src.core.subst import alpha_equal, subst_prio
from src.syntax import surface as S

logger = logging.getLogger(__name__)

Bindings = List[Tuple[str, T.Expr]]


class ValueBinding(NamedTuple):
    ty: T.Type
    recursive: bool = False


@dataclass(frozen=True)
class ElabContext:
    """Value variables, priority variables in scope (surface name -> core name) and type abbreviations."""
    values: Dict[str, ValueBinding] = field(default_factory=dict)
    entail: EntailContext = field(default_factory=EntailContext)
    prio_scope: Dict[str, str] = field(default_factory=dict)
    aliases: Dict[str, T.Type] = field(default_factory=dict)

    def bind(self, name: str, ty: T.Type, recursive: bool = False) -> "ElabContext":
        values = dict(self.values)
        values[name] = ValueBinding(ty, recursive)
        return ElabContext(values, self.entail, self.prio_scope, self.aliases)

    def bind_prio(self, surface_name: str, core_name: str) -> "ElabContext":
        scope = dict(self.prio_scope)
        scope[surface_name] = core_name
        return ElabContext(self.values, self.entail.extend(core_name), scope, self.aliases)

    def assume(self, constraint: T.Constraint) -> "ElabContext":
        return ElabContext(self.values, self.entail.extend(constraint=constraint), self.prio_scope, self.aliases)

    def alias(self, name: str, ty: T.Type) -> "ElabContext":
        aliases = dict(self.aliases)
        aliases[name] = ty
        return ElabContext(self.values, self.entail, self.prio_scope, aliases)


class ElabResult(NamedTuple):
    cmd: T.Cmd
    store: PriorityOrder
    bindings: Tuple[Tuple[str, T.Type], ...]


def wrap(binds: Bindings, body: T.Expr) -> T.Expr:
    for name, bound in reversed(binds):
        body = T.Let(name, bound, body)
    return body


def _is_recursive_ref(ctx: "ElabContext", e: T.Expr) -> bool:
    """Fix-bound names never sit directly in a value position."""
    if not isinstance(e, T.Var):
        return False
    binding = ctx.values.get(e.name)
    return binding is not None and binding.recursive


def _mismatch(what: str, span: Optional[SourceSpan], expected, found: T.Type) -> TypeMismatch:
    expected_text = expected if isinstance(expected, str) else show_type(expected)
    return TypeMismatch(what, span, expected_text, show_type(found))


class Elaborator:
    """
    One elaboration run. Holds the priority store and the fresh-name supplies,
    so output is deterministic for a given input.
    """

    def __init__(self, store: PriorityOrder):
        self.store = store
        self.temps = NameSupply(sep="'")
        self.prio_counter = ScopedCounter()

    # ------------------------- names, priorities and types -------------------------

    def prio(self, ctx: ElabContext, ref: S.PrioRef) -> T.Priority:
        if ref.name in ctx.prio_scope:
            return T.PVar(ctx.prio_scope[ref.name])
        if ref.name in self.store:
            return T.PConst(ref.name)
        raise UnknownPriority(f"unknown priority {ref.name}", ref.span)

    def constraint(self, ctx: ElabContext, les: Sequence[S.SLe], var: str) -> T.Constraint:
        if not les:
            return T.le(T.BOT, T.PVar(var))
        return T.Constraint(tuple(T.Le(self.prio(ctx, c.lhs), self.prio(ctx, c.rhs)) for c in les))

    def bind_prio_param(self, ctx: ElabContext, name: str, les: Sequence[S.SLe]) -> Tuple[ElabContext, str, T.Constraint]:
        core_name = self.prio_counter.next(name)
        inner = ctx.bind_prio(name, core_name)
        constraint = self.constraint(inner, les, core_name)
        return inner.assume(constraint), core_name, constraint

    def type(self, ctx: ElabContext, ty) -> T.Type:
        if isinstance(ty, S.TyUnit):
            return T.UNIT
        if isinstance(ty, S.TyNat):
            return T.NAT
        if isinstance(ty, S.TyAlias):
            if ty.name not in ctx.aliases:
                raise UnboundVariable(f"unknown type {ty.name}", ty.span)
            return ctx.aliases[ty.name]
        if isinstance(ty, S.TyArrow):
            return T.Arrow(self.type(ctx, ty.dom), self.type(ctx, ty.cod))
        if isinstance(ty, S.TyProd):
            return T.Prod(self.type(ctx, ty.left), self.type(ctx, ty.right))
        if isinstance(ty, S.TySum):
            return T.Sum(self.type(ctx, ty.left), self.type(ctx, ty.right))
        if isinstance(ty, S.TyThread):
            return T.ThreadT(self.type(ctx, ty.payload), self.prio(ctx, ty.prio))
        if isinstance(ty, S.TyCmd):
            return T.CmdT(self.type(ctx, ty.payload), self.prio(ctx, ty.prio))
        if isinstance(ty, S.TyForall):
            inner, core_name, constraint = self.bind_prio_param(ctx, ty.var, ty.constraint)
            return T.Forall(core_name, constraint, self.type(inner, ty.body))
        raise TypeError(f"not a surface type: {ty!r}")

    # ------------------------- expressions -------------------------

    def value(self, ctx: ElabContext, se, expected: Optional[T.Type] = None) -> Tuple[Bindings, T.Expr, T.Type]:
        """Elaborate se and name its result unless it is already a value."""
        e, ty = self.expr(ctx, se, expected)
        if T.is_value(e) and not _is_recursive_ref(ctx, e):
            return [], e, ty
        temp = self.temps.fresh("t")
        return [(temp, e)], T.Var(temp), ty

    def expr(self, ctx: ElabContext, se, expected: Optional[T.Type] = None) -> Tuple[T.Expr, T.Type]:
        e, ty = self._expr(ctx, se, expected)
        if expected is not None and not alpha_equal(expected, ty):
            raise _mismatch("type mismatch", se.span, expected, ty)
        return e, ty

    def _expr(self, ctx: ElabContext, se, expected: Optional[T.Type]) -> Tuple[T.Expr, T.Type]:
        if isinstance(se, S.Ident):
            binding = ctx.values.get(se.name)
            if binding is None:
                raise UnboundVariable(f"unbound variable {se.name}", se.span)
            return T.Var(se.name), binding.ty
        if isinstance(se, S.NatLit):
            return T.Num(se.value), T.NAT
        if isinstance(se, S.UnitLit):
            return T.UnitV(), T.UNIT
        if isinstance(se, S.InputExpr):
            return T.Input(), T.NAT
        if isinstance(se, S.AnnotExpr):
            return self.expr(ctx, se.expr, self.type(ctx, se.ty))
        if isinstance(se, S.FnExpr):
            return self._fn(ctx, se, expected)
        if isinstance(se, S.ApplyExpr):
            fb, fv, fty = self.value(ctx, se.fn)
            if not isinstance(fty, T.Arrow):
                raise _mismatch("application of a non-function", se.fn.span, "a function type", fty)
            ab, av, _ = self.value(ctx, se.arg, fty.dom)
            return wrap(fb + ab, T.App(fv, av)), fty.cod
        if isinstance(se, S.PairExpr):
            left_expected = expected.left if isinstance(expected, T.Prod) else None
            right_expected = expected.right if isinstance(expected, T.Prod) else None
            lb, lv, lty = self.value(ctx, se.left, left_expected)
            rb, rv, rty = self.value(ctx, se.right, right_expected)
            return wrap(lb + rb, T.MkPair(lv, rv)), T.Prod(lty, rty)
        if isinstance(se, (S.FstExpr, S.SndExpr)):
            b, v, ty = self.value(ctx, se.value)
            if not isinstance(ty, T.Prod):
                raise _mismatch("projection from a non-pair", se.value.span, "a product type", ty)
            if isinstance(se, S.FstExpr):
                return wrap(b, T.Fst(v)), ty.left
            return wrap(b, T.Snd(v)), ty.right
        if isinstance(se, (S.InlExpr, S.InrExpr)):
            if not isinstance(expected, T.Sum):
                raise TypeMismatch("cannot determine the sum type of this injection; add a type annotation", se.span)
            left = isinstance(se, S.InlExpr)
            b, v, _ = self.value(ctx, se.value, expected.left if left else expected.right)
            node = T.MkInl(v, expected) if left else T.MkInr(v, expected)
            return wrap(b, node), expected
        if isinstance(se, (S.SuccExpr, S.OutputExpr)):
            b, v, _ = self.value(ctx, se.value, T.NAT)
            if isinstance(se, S.SuccExpr):
                return wrap(b, T.Succ(v)), T.NAT
            return wrap(b, T.Output(v)), T.UNIT
        if isinstance(se, S.CaseExpr):
            b, v, ty = self.value(ctx, se.scrutinee)
            if not isinstance(ty, T.Sum):
                raise _mismatch("case on a non-sum", se.scrutinee.span, "a sum type", ty)
            left, lty = self.expr(ctx.bind(se.left_var, ty.left), se.left, expected)
            right, _ = self.expr(ctx.bind(se.right_var, ty.right), se.right, expected or lty)
            return wrap(b, T.Case(v, se.left_var, left, se.right_var, right)), lty
        if isinstance(se, S.IfzExpr):
            b, v, _ = self.value(ctx, se.value, T.NAT)
            zero, zty = self.expr(ctx, se.if_zero, expected)
            succ, _ = self.expr(ctx.bind(se.var, T.NAT), se.if_succ, expected or zty)
            return wrap(b, T.Ifz(v, zero, se.var, succ)), zty
        if isinstance(se, S.LetExpr):
            return self._let(ctx, list(se.decls), se.body, expected)
        if isinstance(se, S.CmdExpr):
            prio = self.prio(ctx, se.prio)
            payload = None
            if isinstance(expected, T.CmdT):
                if expected.prio != prio:
                    raise TypeMismatch("command at the wrong priority", se.span,
                                       f"cmd[{show_prio(expected.prio)}]", f"cmd[{show_prio(prio)}]")
                payload = expected.payload
            cmd, ty = self.cmd(ctx, se.cmd, prio, payload)
            return T.CmdV(prio, cmd), T.CmdT(ty, prio)
        if isinstance(se, S.PrioAppExpr):
            b, v, ty = self.value(ctx, se.value)
            if not isinstance(ty, T.Forall):
                raise _mismatch("priority application of a non-polymorphic value", se.value.span,
                                "a forall type", ty)
            prio = self.prio(ctx, se.prio)
            self.require(ctx, subst_prio(prio, ty.var, ty.constraint), se.span)
            return wrap(b, T.PrApp(v, prio)), subst_prio(prio, ty.var, ty.body)
        if isinstance(se, S.FixExpr):
            ty = self.type(ctx, se.ty)
            body, _ = self.expr(ctx.bind(se.var, ty, recursive=True), se.body, ty)
            return T.Fix(se.var, ty, body), ty
        raise TypeError(f"not a surface expression: {se!r}")

    def _fn(self, ctx: ElabContext, se: S.FnExpr, expected: Optional[T.Type]) -> Tuple[T.Expr, T.Type]:
        if se.ty is not None:
            dom = self.type(ctx, se.ty)
        elif isinstance(expected, T.Arrow):
            dom = expected.dom
        else:
            raise TypeMismatch(f"cannot infer the type of parameter {se.var}; write fn ({se.var} : type) => ...",
                               se.span)
        cod_expected = expected.cod if isinstance(expected, T.Arrow) else None
        body, cod = self.expr(ctx.bind(se.var, dom), se.body, cod_expected)
        return T.Lam(se.var, dom, body), T.Arrow(dom, cod)

    def _let(self, ctx: ElabContext, decls, body, expected) -> Tuple[T.Expr, T.Type]:
        if not decls:
            return self.expr(ctx, body, expected)
        name, bound, ty = self.decl(ctx, decls[0])
        rest, rest_ty = self._let(ctx.bind(name, ty), decls[1:], body, expected)
        fn = T.Lam(name, ty, rest)
        if T.is_value(bound) and not _is_recursive_ref(ctx, bound):
            return T.App(fn, bound), rest_ty
        temp = self.temps.fresh("t")
        return T.Let(temp, bound, T.App(fn, T.Var(temp))), rest_ty

    def require(self, ctx: ElabContext, goal: T.Constraint, span: Optional[SourceSpan],
                error=ConstraintViolation) -> None:
        for conj in goal.conjuncts:
            if not entails(self.store, ctx.entail, T.Constraint((conj,))):
                raise error(show_prio(conj.lhs), show_prio(conj.rhs), span)

    # ------------------------- commands -------------------------

    def instr(self, ctx: ElabContext, instr, prio: T.Priority,
              expected: Optional[T.Type] = None) -> Tuple[T.Cmd, T.Type]:
        """An instruction as a core command run at prio, with its return type."""
        if isinstance(instr, S.RetInstr):
            e, ty = self.expr(ctx, instr.expr, expected)
            return T.Ret(e), ty
        if isinstance(instr, S.DoInstr):
            e, ty = self.do_operand(ctx, instr, prio, expected)
            var = self.temps.fresh("x")
            return T.Bind(e, var, T.Ret(T.Var(var))), ty.payload
        if isinstance(instr, S.SyncInstr):
            e, ty = self.expr(ctx, instr.expr)
            if not isinstance(ty, T.ThreadT):
                raise _mismatch("sync on a non-thread", instr.expr.span, "a thread type", ty)
            self.require(ctx, T.le(prio, ty.prio), instr.span, error=PriorityInversion)
            if expected is not None and not alpha_equal(expected, ty.payload):
                raise _mismatch("type mismatch", instr.span, expected, ty.payload)
            return T.Sync(e), ty.payload
        if isinstance(instr, S.SpawnInstr):
            child_prio = self.prio(ctx, instr.prio)
            payload = expected.payload if isinstance(expected, T.ThreadT) else None
            body, ty = self.cmd(ctx, instr.body, child_prio, payload)
            result = T.ThreadT(ty, child_prio)
            if expected is not None and not alpha_equal(expected, result):
                raise _mismatch("type mismatch", instr.span, expected, result)
            return T.Spawn(child_prio, ty, body), result
        raise TypeError(f"not an instruction: {instr!r}")

    def do_operand(self, ctx: ElabContext, instr: S.DoInstr, prio: T.Priority,
                   expected: Optional[T.Type]) -> Tuple[T.Expr, T.CmdT]:
        hint = T.CmdT(expected, prio) if expected is not None else None
        e, ty = self.expr(ctx, instr.expr, hint)
        if not isinstance(ty, T.CmdT):
            raise _mismatch("do of a non-command", instr.expr.span, f"a cmd[{show_prio(prio)}] type", ty)
        if ty.prio != prio:
            raise TypeMismatch("do of a command at another priority", instr.span,
                               f"cmd[{show_prio(prio)}]", f"cmd[{show_prio(ty.prio)}]")
        return e, ty

    def cmd(self, ctx: ElabContext, m: S.SurfaceCmd, prio: T.Priority,
            expected: Optional[T.Type] = None) -> Tuple[T.Cmd, T.Type]:
        if not m.steps:
            return self.instr(ctx, m.last, prio, expected)
        step, rest_steps = m.steps[0], m.steps[1:]
        var = step.var if step.var is not None else self.temps.fresh("u")
        rest_cmd = S.SurfaceCmd(rest_steps, m.last, m.span)
        if isinstance(step.instr, S.DoInstr):
            e, ty = self.do_operand(ctx, step.instr, prio, None)
            payload = ty.payload
        else:
            core, payload = self.instr(ctx, step.instr, prio)
            e = T.CmdV(prio, core)
        rest, ty = self.cmd(ctx.bind(var, payload), rest_cmd, prio, expected)
        return T.Bind(e, var, rest), ty

    # ------------------------- declarations -------------------------

    def decl(self, ctx: ElabContext, d) -> Tuple[str, T.Expr, T.Type]:
        """Elaborate a declaration to (bound name, core expression, type)."""
        if isinstance(d, S.ValDecl):
            expected = self.type(ctx, d.ty) if d.ty is not None else None
            e, ty = self.expr(ctx, d.expr, expected)
            return d.name, e, ty
        if isinstance(d, S.FunDecl):
            return self._fun(ctx, ctx, (), d)
        if isinstance(d, S.PolyFunDecl):
            inner = ctx
            binders: List[Tuple[str, T.Constraint]] = []
            for param in d.prio_params:
                inner, core_name, constraint = self.bind_prio_param(inner, param.name, param.constraint)
                binders.append((core_name, constraint))
            return self._fun(ctx, inner, tuple(binders), d)
        raise TypeError(f"not a declaration: {d!r}")

    def _fun(self, outer: ElabContext, inner: ElabContext, binders, d) -> Tuple[str, T.Expr, T.Type]:
        params = [(p.name, self.type(inner, p.ty)) for p in d.params]
        result = self.type(inner, d.result)
        arrow = result
        for _, ty in reversed(params):
            arrow = T.Arrow(ty, arrow)
        fn_ty = arrow
        for var, constraint in reversed(binders):
            fn_ty = T.Forall(var, constraint, fn_ty)

        body_ctx = inner.bind(d.name, fn_ty, recursive=True)
        for name, ty in params:
            body_ctx = body_ctx.bind(name, ty)
        body, _ = self.expr(body_ctx, d.body, result)
        for name, ty in reversed(params):
            body = T.Lam(name, ty, body)
        for var, constraint in reversed(binders):
            body = T.PLam(var, constraint, body)
        logger.debug(f"Elaborated {d.name} : {show_type(fn_ty)}")
        return d.name, T.Fix(d.name, fn_ty, body), fn_ty

    # ------------------------- programs -------------------------

    def program(self, toplevels, main: Optional[S.SurfaceCmd]) -> ElabResult:
        for top in toplevels:
            if isinstance(top, S.PriorityDecl):
                self.store.declare_priority(top.name, top.span)
        for top in toplevels:
            if isinstance(top, S.OrderDecl):
                self.store.declare_order(top.lo, top.hi, top.span)

        ctx = ElabContext()
        bound: List[Tuple[str, T.Expr, T.Type]] = []
        for top in toplevels:
            if isinstance(top, (S.PriorityDecl, S.OrderDecl)):
                continue
            self.prio_counter = ScopedCounter()
            if isinstance(top, S.TypeDecl):
                ctx = ctx.alias(top.name, self.type(ctx, top.ty))
                continue
            name, e, ty = self.decl(ctx, top)
            bound.append((name, e, ty))
            ctx = ctx.bind(name, ty)

        self.prio_counter = ScopedCounter()
        if main is not None:
            cmd, _ = self.cmd(ctx, main, T.BOT)
        else:
            cmd = T.Ret(T.UnitV())
        for name, e, _ in reversed(bound):
            cmd = T.Bind(T.CmdV(T.BOT, T.Ret(e)), name, cmd)
        return ElabResult(cmd, self.store, tuple((name, ty) for name, _, ty in bound))


# ------------------------- entry points -------------------------

def elaborate(program: S.Program, store: Optional[PriorityOrder] = None,
              prelude: Optional[S.Program] = None) -> ElabResult:
    """
    Elaborate program (preceded by prelude's declarations, if given) against a
    copy of store. The returned command is meant to be run at bot.
    """
    store = store.copy() if store is not None else PriorityOrder()
    toplevels = tuple(prelude.toplevels if prelude is not None else ()) + tuple(program.toplevels)
    result = Elaborator(store).program(toplevels, program.main)
    logger.info(f"Elaborated {len(result.bindings)} declarations; priorities {list(store.names)}")
    return result


def elab_program(store: PriorityOrder, program: S.Program) -> Tuple[T.Cmd, PriorityOrder]:
    result = elaborate(program, store)
    return result.cmd, result.store


def elab_expr(ctx: ElabContext, se, store: Optional[PriorityOrder] = None) -> Tuple[T.Expr, T.Type]:
    return Elaborator(store or PriorityOrder()).expr(ctx, se)


def elab_decl(ctx: ElabContext, d, store: Optional[PriorityOrder] = None) -> Tuple[str, T.Expr, T.Type]:
    return Elaborator(store or PriorityOrder()).decl(ctx, d)
