import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core import terms as T
from src.core.priorities import PriorityOrder
from src.core.subst import subst_expr
from src.core.errors import ConstraintViolation, PriorityInversion, TypeMismatch, UnboundVariable, UnknownThread
from src.core.actions import SILENT, RetOf, SyncFrom
from src.runtime.pool import ThreadPool
from src.statics import SigEntry, TypeContext, check_program, type_action, type_cmd, type_expr, type_threadpool
from strategies import nat_terms

HI, LO = T.PConst("hi"), T.PConst("lo")
EMPTY = TypeContext()


def spawn(prio, body, ty=T.NAT):
    return T.Spawn(prio, ty, body)


def test_values(two_level):
    assert type_expr(two_level, {}, EMPTY, T.Num(4)) == T.NAT
    assert type_expr(two_level, {}, EMPTY, T.PairV(T.Num(1), T.UnitV())) == T.Prod(T.NAT, T.UNIT)
    assert type_expr(two_level, {}, EMPTY, T.Lam("x", T.NAT, T.Var("x"))) == T.Arrow(T.NAT, T.NAT)


def test_thread_ids_come_from_the_signature(two_level):
    sig = {"t1": SigEntry(T.NAT, HI)}
    assert type_expr(two_level, sig, EMPTY, T.Tid("t1")) == T.ThreadT(T.NAT, HI)
    with pytest.raises(UnknownThread):
        type_expr(two_level, sig, EMPTY, T.Tid("t2"))


def test_unbound_variable(two_level):
    with pytest.raises(UnboundVariable):
        type_expr(two_level, {}, EMPTY, T.Var("x"))


def test_application_mismatch(two_level):
    with pytest.raises(TypeMismatch) as info:
        type_expr(two_level, {}, EMPTY, T.App(T.Lam("x", T.NAT, T.Var("x")), T.UnitV()))
    assert info.value.expected == "nat"
    assert info.value.found == "unit"


def test_spawn_then_sync_upwards(two_level):
    m = T.Bind(T.CmdV(LO, spawn(HI, T.Ret(T.Num(1)))), "t", T.Sync(T.Var("t")))
    assert type_cmd(two_level, {}, EMPTY, m, LO) == T.NAT


def test_sync_downwards_is_an_inversion(two_level):
    m = T.Bind(T.CmdV(HI, spawn(LO, T.Ret(T.Num(1)))), "t", T.Sync(T.Var("t")))
    with pytest.raises(PriorityInversion) as info:
        type_cmd(two_level, {}, EMPTY, m, HI)
    assert info.value.message == "constraint violated: hi <= lo"


def test_bind_at_another_priority(two_level):
    m = T.Bind(T.CmdV(HI, T.Ret(T.Num(1))), "x", T.Ret(T.Var("x")))
    with pytest.raises(TypeMismatch):
        type_cmd(two_level, {}, EMPTY, m, LO)


def test_priority_application_checks_the_constraint(two_level):
    p = T.PVar("p")
    poly = T.PLam("p", T.le(HI, p), T.CmdV(p, T.Ret(T.UnitV())))
    ty = type_expr(two_level, {}, EMPTY, poly)
    assert isinstance(ty, T.Forall)
    assert type_expr(two_level, {}, EMPTY, T.PrApp(poly, HI)) == T.CmdT(T.UNIT, HI)
    with pytest.raises(ConstraintViolation):
        type_expr(two_level, {}, EMPTY, T.PrApp(poly, LO))


def test_polymorphic_sync_needs_an_assumption(two_level):
    p = T.PVar("p")
    body = T.Lam("t", T.ThreadT(T.NAT, p), T.CmdV(HI, T.Sync(T.Var("t"))))
    with pytest.raises(PriorityInversion):
        type_expr(two_level, {}, EMPTY, T.PLam("p", T.le(T.BOT, p), body))
    assert isinstance(type_expr(two_level, {}, EMPTY, T.PLam("p", T.le(HI, p), body)), T.Forall)


def test_fix(two_level):
    ty = T.Arrow(T.NAT, T.NAT)
    e = T.Fix("f", ty, T.Lam("n", T.NAT, T.Ifz(T.Var("n"), T.Num(0), "k", T.App(T.Var("f"), T.Var("k")))))
    assert type_expr(two_level, {}, EMPTY, e) == ty


def test_program_is_typed_at_bot(two_level):
    m = T.Bind(T.CmdV(T.BOT, spawn(LO, T.Ret(T.Num(2)))), "t", T.Sync(T.Var("t")))
    assert check_program(two_level, m) == T.NAT


def test_threadpool_types_running_and_retained_threads(two_level):
    pool = ThreadPool()
    pool.add("main", T.BOT, T.Sync(T.Tid("t1")), T.NAT)
    pool.add("t1", HI, T.Ret(T.Num(5)), T.NAT)
    sig = type_threadpool(two_level, {}, pool)
    assert sig["t1"] == SigEntry(T.NAT, HI)


def test_threadpool_rejects_a_wrong_declared_type(two_level):
    pool = ThreadPool()
    pool.add("main", T.BOT, T.Ret(T.UnitV()), T.NAT)
    with pytest.raises(TypeMismatch):
        type_threadpool(two_level, {}, pool)


def test_actions_carry_values_of_the_declared_type(two_level):
    sig = {"t1": SigEntry(T.NAT, HI)}
    type_action(two_level, sig, SILENT)
    type_action(two_level, sig, RetOf("t1", T.Num(3)))
    with pytest.raises(TypeMismatch):
        type_action(two_level, sig, SyncFrom("t1", T.UnitV()))
    with pytest.raises(UnknownThread):
        type_action(two_level, sig, RetOf("t2", T.Num(1)))


def test_threadpool_with_threads_that_name_each_other(two_level):
    pool = ThreadPool()
    pool.add("main", T.BOT, T.Ret(T.UnitV()), T.UNIT)
    pool.add("t1", LO, T.Sync(T.Tid("t2")), T.NAT)
    pool.add("t2", HI, T.Ret(T.Fst(T.MkPair(T.Num(0), T.Tid("t1")))), T.NAT)
    sig = type_threadpool(two_level, {}, pool)
    assert set(sig) == {"main", "t1", "t2"}

    pool.threads["t2"] = (HI, T.Sync(T.Tid("t1")))
    with pytest.raises(PriorityInversion):
        type_threadpool(two_level, {}, pool)


# ------------------------- properties -------------------------

STORE = PriorityOrder()


@settings(max_examples=80, deadline=None)
@given(nat_terms(env=("x", "y")), st.sampled_from([T.UNIT, T.NAT, T.ThreadT(T.NAT, T.BOT)]))
def test_typing_survives_weakening(e, extra):
    ctx = EMPTY.bind("x", T.NAT).bind("y", T.NAT)
    sig = {"t9": SigEntry(T.NAT, T.BOT)}
    ty = type_expr(STORE, {}, ctx, e)
    assert ty == T.NAT
    assert type_expr(STORE, sig, ctx.bind("fresh", extra), e) == ty
    assert type_expr(STORE, {}, ctx.bind_prio("q"), e) == ty


@settings(max_examples=80, deadline=None)
@given(nat_terms(env=("x", "y")), st.one_of(st.integers(min_value=0, max_value=5).map(T.Num), st.just(T.Var("y"))))
def test_substitution_preserves_types(e, v):
    ctx = EMPTY.bind("y", T.NAT)
    assert type_expr(STORE, {}, ctx.bind("x", T.NAT), e) == T.NAT
    assert type_expr(STORE, {}, ctx, subst_expr(v, "x", e)) == T.NAT
