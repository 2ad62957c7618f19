import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core import terms as T
from src.core.errors import CycleDetected, DuplicatePriority, UnknownPriority
from src.core.priorities import EntailContext, PriorityOrder, ctxify, entails, entails_le, order_from, warshall
from strategies import priority_orders


def test_bot_is_below_every_constant(diamond):
    for name in diamond.names:
        assert diamond.le("bot", name)
    assert not diamond.le("low", "bot")


def test_closure_is_transitive(diamond):
    assert diamond.le("low", "high")
    assert diamond.lt("low", "high")
    assert not diamond.le("left", "right")
    assert not diamond.le("right", "left")
    assert diamond.le("left", "left")
    assert not diamond.lt("left", "left")


def test_duplicate_priority_is_rejected():
    store = PriorityOrder().declare_priority("p")
    with pytest.raises(DuplicatePriority):
        store.declare_priority("p")
    with pytest.raises(DuplicatePriority):
        PriorityOrder().declare_priority("bot")


def test_unknown_priority_in_order():
    store = PriorityOrder().declare_priority("p")
    with pytest.raises(UnknownPriority):
        store.declare_order("p", "q")


def test_cycle_is_rejected_and_store_unchanged(two_level):
    with pytest.raises(CycleDetected) as info:
        two_level.declare_order("hi", "lo")
    assert (info.value.lo, info.value.hi) == ("hi", "lo")
    assert two_level.edges == (("lo", "hi"),)
    assert not two_level.le("hi", "lo")


def test_self_order_is_a_cycle():
    store = PriorityOrder().declare_priority("p")
    with pytest.raises(CycleDetected):
        store.declare_order("p", "p")


def test_total_order_breaks_ties_by_declaration():
    store = order_from(["a", "b", "c"], [("a", "c")])
    assert store.total_order() == ["bot", "a", "b", "c"]
    assert store.rank()["c"] == 3


def test_total_order_follows_edges_against_declaration():
    store = order_from(["hi", "lo"], [("lo", "hi")])
    assert store.total_order() == ["bot", "lo", "hi"]


def test_copy_is_independent(two_level):
    other = two_level.copy()
    other.declare_priority("extra")
    assert "extra" in other
    assert "extra" not in two_level


def test_warshall_small():
    adjacency = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=bool)
    reach = warshall(adjacency)
    assert reach[0, 2] and reach[1, 1] and not reach[2, 0]


@settings(max_examples=60, deadline=None)
@given(priority_orders())
def test_closure_matches_networkx(store):
    graph = nx.DiGraph()
    graph.add_nodes_from(store.names)
    graph.add_edges_from(("bot", name) for name in store.names[1:])
    graph.add_edges_from(store.edges)
    for lo in store.names:
        for hi in store.names:
            assert store.le(lo, hi) == (lo == hi or nx.has_path(graph, lo, hi))


@settings(max_examples=60, deadline=None)
@given(priority_orders())
def test_total_order_is_a_linear_extension(store):
    rank = store.rank()
    assert sorted(rank.values()) == list(range(len(store.names)))
    for lo in store.names:
        for hi in store.names:
            if store.lt(lo, hi):
                assert rank[lo] < rank[hi]


# ------------------------- entailment -------------------------

def test_entails_constants(diamond):
    ctx = EntailContext()
    assert entails_le(diamond, ctx, T.PConst("low"), T.PConst("high"))
    assert not entails_le(diamond, ctx, T.PConst("left"), T.PConst("right"))


def test_entails_uses_assumptions(diamond):
    ctx = EntailContext().extend("p", T.le(T.PConst("high"), T.PVar("p")))
    assert entails_le(diamond, ctx, T.PConst("low"), T.PVar("p"))
    assert entails_le(diamond, ctx, T.PVar("p"), T.PVar("p"))
    assert not entails_le(diamond, ctx, T.PVar("p"), T.PConst("high"))


def test_entails_conjunction(diamond):
    ctx = EntailContext()
    goal = T.Constraint((T.Le(T.PConst("low"), T.PConst("left")), T.Le(T.PConst("left"), T.PConst("right"))))
    assert not entails(diamond, ctx, goal)


def test_entails_rejects_unbound_variables(diamond):
    with pytest.raises(UnknownPriority):
        entails_le(diamond, EntailContext(), T.PVar("p"), T.PConst("low"))
    with pytest.raises(UnknownPriority):
        entails_le(diamond, EntailContext(), T.PConst("nope"), T.PConst("low"))


@settings(max_examples=40, deadline=None)
@given(priority_orders(), st.data())
def test_ctxify_preserves_entailment(store, data):
    ctx, bare = ctxify(store)
    assert bare.edges == ()
    lo = data.draw(st.sampled_from(store.names))
    hi = data.draw(st.sampled_from(store.names))
    direct = entails_le(store, EntailContext(), T.PConst(lo), T.PConst(hi))
    assert entails_le(bare, ctx, T.PConst(lo), T.PConst(hi)) == direct


# ------------------------- entailment against derivations -------------------------

# at most this many distinct atoms (constants including bot, plus variables)
ENTAIL_ATOMS = 5
ENTAIL_EXAMPLES = 150


def derivable(atoms, facts):
    """Every judgment lo <= hi provable from facts by reflexivity and transitivity, by saturation."""
    known = {(a, a) for a in atoms} | set(facts)
    while True:
        step = {(a, c) for a, b in known for b2, c in known if b == b2}
        if step <= known:
            return known
        known |= step


@pytest.mark.slow
@settings(max_examples=ENTAIL_EXAMPLES, deadline=None)
@given(priority_orders(max_size=ENTAIL_ATOMS - 2), st.data())
def test_entails_matches_an_exhaustive_derivation_search(store, data):
    consts = [T.PConst(name) for name in store.names]
    n_vars = data.draw(st.integers(min_value=0, max_value=max(ENTAIL_ATOMS - len(consts), 0)))
    pvars = [T.PVar(f"v{k}") for k in range(n_vars)]
    atoms = consts + pvars
    assumed = data.draw(st.lists(st.tuples(st.sampled_from(atoms), st.sampled_from(atoms)), max_size=4))
    ctx = EntailContext(frozenset(v.name for v in pvars), frozenset(assumed))

    facts = {(T.PConst("bot"), c) for c in consts}
    facts |= {(T.PConst(lo), T.PConst(hi)) for lo, hi in store.edges}
    facts |= set(assumed)
    proofs = derivable(atoms, facts)
    for lo in atoms:
        for hi in atoms:
            assert entails_le(store, ctx, lo, hi) == ((lo, hi) in proofs), (lo, hi)
