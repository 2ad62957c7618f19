from hypothesis import given, settings
from hypothesis import strategies as st

from src.core import terms as T
from src.core.subst import alpha_equal, free_vars, rename, subst_expr, subst_prio, term_size
from src.runtime import step_expr
from strategies import nat_terms, tid_values


def lam(x, body, ty=T.NAT):
    return T.Lam(x, ty, body)


def test_free_vars_respects_binders():
    e = T.App(lam("x", T.MkPair(T.Var("x"), T.Var("y"))), T.Var("z"))
    assert free_vars(e) == {"y", "z"}


def test_free_prio_vars():
    e = T.PLam("p", T.le(T.PConst("lo"), T.PVar("p")), T.CmdV(T.PVar("q"), T.Ret(T.UnitV())))
    assert free_vars(e, T.PRIO) == {"q"}


def test_free_vars_in_commands():
    m = T.Bind(T.Var("c"), "x", T.Sync(T.Var("x")))
    assert free_vars(m) == {"c"}


def test_subst_replaces_free_occurrences():
    e = T.MkPair(T.Var("x"), lam("x", T.Var("x")))
    out = subst_expr(T.Num(3), "x", e)
    assert out == T.MkPair(T.Num(3), lam("x", T.Var("x")))


def test_subst_avoids_capture():
    e = lam("y", T.MkPair(T.Var("x"), T.Var("y")))
    out = subst_expr(T.Var("y"), "x", e)
    assert isinstance(out, T.Lam)
    assert out.var != "y"
    assert out.body == T.MkPair(T.Var("y"), T.Var(out.var))
    assert free_vars(out) == {"y"}


def test_capture_renaming_is_repeatable():
    e = lam("y", T.MkPair(T.Var("x"), T.Var("y")))
    first = subst_expr(T.Var("y"), "x", e)
    second = subst_expr(T.Var("y"), "x", e)
    assert first == second
    assert first.var == "y'1"


def test_capture_renaming_skips_names_in_use():
    e = lam("y", T.MkPair(T.Var("x"), T.MkPair(T.Var("y"), T.Var("y'1"))))
    out = subst_expr(T.Var("y"), "x", e)
    assert out.var == "y'2"
    assert free_vars(out) == {"y", "y'1"}


def test_subst_prio_avoids_capture():
    body = T.CmdV(T.PVar("q"), T.Ret(T.UnitV()))
    e = T.PLam("p", T.le(T.PConst("bot"), T.PVar("p")), T.MkPair(body, T.CmdV(T.PVar("p"), T.Ret(T.UnitV()))))
    out = subst_prio(T.PVar("p"), "q", e)
    assert out.var != "p"
    assert free_vars(out, T.PRIO) == {"p"}


def test_subst_into_types():
    ty = T.ThreadT(T.NAT, T.PVar("p"))
    assert subst_prio(T.PConst("hi"), "p", ty) == T.ThreadT(T.NAT, T.PConst("hi"))


def test_subst_into_command_binder():
    m = T.Bind(T.Var("c"), "x", T.Ret(T.MkPair(T.Var("x"), T.Var("c"))))
    out = subst_expr(T.Num(1), "c", m)
    assert out == T.Bind(T.Num(1), "x", T.Ret(T.MkPair(T.Var("x"), T.Num(1))))


def test_alpha_equal():
    assert alpha_equal(lam("x", T.Var("x")), lam("y", T.Var("y")))
    assert not alpha_equal(lam("x", T.Var("x")), lam("y", T.Var("x")))
    assert alpha_equal(
        T.Forall("p", T.le(T.BOT, T.PVar("p")), T.CmdT(T.NAT, T.PVar("p"))),
        T.Forall("q", T.le(T.BOT, T.PVar("q")), T.CmdT(T.NAT, T.PVar("q"))),
    )
    assert not alpha_equal(T.CmdT(T.NAT, T.PConst("a")), T.CmdT(T.NAT, T.PConst("b")))


def test_rename_only_touches_free_names():
    e = T.MkPair(T.Var("x"), lam("x", T.Var("x")))
    assert rename(e, T.VAL, "x", "w") == T.MkPair(T.Var("w"), lam("x", T.Var("x")))


def test_term_size():
    assert term_size(T.Num(1)) == 1
    assert term_size(T.MkPair(T.Num(1), T.Num(2))) == 3


def test_value_check_needs_bound_threads():
    v = T.PairV(T.Num(1), T.Tid("t1"))
    assert T.value_check(v, {"t1"})
    assert not T.value_check(v, set())
    assert not T.value_check(T.App(T.Lam("x", T.NAT, T.Var("x")), T.Num(1)), set())


# ------------------------- properties -------------------------

def freshen(e, tag: str):
    """Rename every binder of a nat term to `<name>_<tag>`."""
    if isinstance(e, T.Let):
        new = f"{e.var}_{tag}"
        return T.Let(new, freshen(e.bound, tag), rename(freshen(e.body, tag), T.VAL, e.var, new))
    if isinstance(e, T.Ifz):
        new = f"{e.var}_{tag}"
        return T.Ifz(e.value, freshen(e.if_zero, tag), new, rename(freshen(e.if_succ, tag), T.VAL, e.var, new))
    if isinstance(e, T.App):
        fn = e.fn
        new = f"{fn.var}_{tag}"
        return T.App(T.Lam(new, fn.ty, rename(freshen(fn.body, tag), T.VAL, fn.var, new)), e.arg)
    return e


def evaluate(e, env):
    """Environment-passing evaluation of nat terms."""
    if isinstance(e, T.Num):
        return e.value
    if isinstance(e, T.Var):
        return env[e.name]
    if isinstance(e, T.Succ):
        return evaluate(e.value, env) + 1
    if isinstance(e, T.Let):
        return evaluate(e.body, {**env, e.var: evaluate(e.bound, env)})
    if isinstance(e, T.Ifz):
        n = evaluate(e.value, env)
        return evaluate(e.if_zero, env) if n == 0 else evaluate(e.if_succ, {**env, e.var: n - 1})
    if isinstance(e, T.App):
        return evaluate(e.fn.body, {**env, e.fn.var: evaluate(e.arg, env)})
    raise TypeError(f"unexpected term {e!r}")


def reduce(e):
    while not T.is_value(e):
        e = step_expr({}, e)
    return e


@settings(max_examples=80, deadline=None)
@given(nat_terms(env=("x", "y", "w")))
def test_alpha_equivalence_is_an_equivalence(e):
    one, two = freshen(e, "1"), freshen(e, "2")
    assert alpha_equal(e, e)
    assert alpha_equal(e, one) and alpha_equal(one, e)
    assert alpha_equal(one, two)
    assert free_vars(one) == free_vars(e)


@settings(max_examples=80, deadline=None)
@given(nat_terms(env=("x", "y")), nat_terms(env=("y", "w"), depth=1))
def test_subst_respects_alpha_equivalence(e, v):
    assert alpha_equal(subst_expr(v, "x", e), subst_expr(v, "x", freshen(e, "1")))


@settings(max_examples=80, deadline=None)
@given(nat_terms(env=("x", "y", "z")), nat_terms(env=("z",), depth=1), nat_terms(env=("x", "z"), depth=1))
def test_substitutions_commute(e, v, w):
    left = subst_expr(v, "x", subst_expr(w, "y", e))
    right = subst_expr(subst_expr(v, "x", w), "y", subst_expr(v, "x", e))
    assert alpha_equal(left, right)


@settings(max_examples=80, deadline=None)
@given(nat_terms())
def test_substitution_agrees_with_an_environment(e):
    assert reduce(e) == T.Num(evaluate(e, {}))


@settings(max_examples=60, deadline=None)
@given(tid_values(), st.sets(st.sampled_from(["t1", "t2", "t3"])), st.sets(st.sampled_from(["t4", "t1", "t9"])))
def test_value_check_survives_weakening(v, sig, extra):
    if T.value_check(v, sig):
        assert T.value_check(v, sig | extra)
        assert T.value_check(v, {name: None for name in sig | extra})
