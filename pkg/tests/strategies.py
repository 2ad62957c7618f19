"""Hypothesis strategies for priority orders, cost DAGs, core terms and programs."""
import networkx as nx
from hypothesis import strategies as st

from src.core import terms as T
from src.core.priorities import order_from
from src.cost.dag import CostDag, ThreadEntry, to_networkx
from src.sim.generate import random_wellformed_dag


@st.composite
def priority_orders(draw, max_size: int = 6):
    """Random partial orders; edges only go from earlier to later names, so they never cycle."""
    n = draw(st.integers(min_value=1, max_value=max_size))
    names = [f"p{k}" for k in range(n)]
    pairs = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return order_from(names, edges)


@st.composite
def wellformed_dags(draw, max_threads: int = 6, max_len: int = 5):
    store = draw(priority_orders(max_size=4))
    n_threads = draw(st.integers(min_value=1, max_value=max_threads))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_wellformed_dag(n_threads, max_len, store, seed=seed)


@st.composite
def nat_exprs(draw, env, depth: int = 2):
    """(source, value) for a nat expression over the prelude's add and sub and the names in env."""
    kinds = ["lit"] + (["var"] if env else []) + (["add", "sub"] if depth > 0 else [])
    kind = draw(st.sampled_from(kinds))
    if kind == "lit":
        n = draw(st.integers(min_value=0, max_value=6))
        return str(n), n
    if kind == "var":
        name = draw(st.sampled_from(sorted(env)))
        return name, env[name]
    lhs, a = draw(nat_exprs(env, depth - 1))
    rhs, b = draw(nat_exprs(env, depth - 1))
    value = a + b if kind == "add" else max(a - b, 0)
    return f"{kind} ({lhs}) ({rhs})", value


@st.composite
def spawn_programs(draw, max_instrs: int = 5):
    """
    Well-scoped programs over two priorities that bind, spawn and sync nat
    computations and output one final nat. Returns (source, expected output).
    """
    env = {}
    pending = {}
    lines = ["priority bg_p", "priority fg_p", "order bg_p < fg_p", "", "main {"]
    for k in range(draw(st.integers(min_value=1, max_value=max_instrs))):
        kind = draw(st.sampled_from(["ret", "spawn", "sync"]))
        if kind == "sync" and pending:
            handle = draw(st.sampled_from(sorted(pending)))
            env[f"y{k}"] = pending.pop(handle)
            lines.append(f"  y{k} <- sync {handle};")
        elif kind == "spawn":
            src, value = draw(nat_exprs(env))
            prio = draw(st.sampled_from(["bg_p", "fg_p"]))
            pending[f"h{k}"] = value
            lines.append(f"  h{k} <- spawn[{prio}] {{ ret ({src}) }};")
        else:
            src, value = draw(nat_exprs(env))
            env[f"x{k}"] = value
            lines.append(f"  x{k} <- ret ({src});")
    src, value = draw(nat_exprs(env))
    lines += [f"  u <- ret (output ({src}));", "  ret ()", "}", ""]
    return "\n".join(lines), value


@st.composite
def arbitrary_dags(draw, max_threads: int = 5, max_len: int = 4):
    """
    Spawn trees rooted at `main` with any priorities and any acyclic join
    edges; neither well-formedness property is guaranteed.
    """
    store = draw(priority_orders(max_size=3))
    n_threads = draw(st.integers(min_value=1, max_value=max_threads))
    names = ["main"] + [f"t{k}" for k in range(1, n_threads)]
    threads = {}
    next_id = 0
    for name in names:
        n = draw(st.integers(min_value=1, max_value=max_len))
        threads[name] = ThreadEntry(draw(st.sampled_from(store.names)), tuple(range(next_id, next_id + n)))
        next_id += n
    spawns = set()
    for k in range(1, n_threads):
        parent = threads[draw(st.sampled_from(names[:k]))]
        spawns.add((parent.vertices[draw(st.integers(min_value=0, max_value=len(parent.vertices) - 1))], names[k]))
    graph = to_networkx(CostDag(threads, frozenset(spawns), frozenset(), store))
    joins = set()
    for _ in range(draw(st.integers(min_value=0, max_value=2 * n_threads))):
        src = draw(st.sampled_from(names))
        dest = threads[draw(st.sampled_from(names))].vertices
        u = dest[draw(st.integers(min_value=0, max_value=len(dest) - 1))]
        last = threads[src].vertices[-1]
        if u == last or nx.has_path(graph, u, last):
            continue
        joins.add((src, u))
        graph.add_edge(last, u)
    return CostDag(threads, frozenset(spawns), frozenset(joins), store)


BINDERS = ("x", "y", "z")


@st.composite
def nat_terms(draw, env=(), depth: int = 3):
    """
    Core terms of type nat in the shape the elaborator produces (operands are
    variables or numerals). Binders reuse a small pool of names so shadowing
    and capture come up often; env lists the free nat variables allowed.
    """
    env = tuple(env)

    def atom():
        return st.one_of(st.integers(min_value=0, max_value=4).map(T.Num),
                         *([st.sampled_from(env).map(T.Var)] if env else []))

    kinds = ["atom", "succ"] + (["let", "ifz", "app"] if depth > 0 else [])
    kind = draw(st.sampled_from(kinds))
    if kind == "atom":
        return draw(atom())
    if kind == "succ":
        return T.Succ(draw(atom()))
    var = draw(st.sampled_from(BINDERS))
    inner = env + (var,)
    if kind == "let":
        return T.Let(var, draw(nat_terms(env, depth - 1)), draw(nat_terms(inner, depth - 1)))
    if kind == "ifz":
        return T.Ifz(draw(atom()), draw(nat_terms(env, depth - 1)), var, draw(nat_terms(inner, depth - 1)))
    return T.App(T.Lam(var, T.NAT, draw(nat_terms(inner, depth - 1))), draw(atom()))


@st.composite
def tid_values(draw, names=("t1", "t2", "t3"), depth: int = 2):
    """Closed values that may name threads."""
    kinds = ["num", "unit", "tid"] + (["pair"] if depth > 0 else [])
    kind = draw(st.sampled_from(kinds))
    if kind == "num":
        return T.Num(draw(st.integers(min_value=0, max_value=9)))
    if kind == "unit":
        return T.UnitV()
    if kind == "tid":
        return T.Tid(draw(st.sampled_from(names)))
    return T.PairV(draw(tid_values(names, depth - 1)), draw(tid_values(names, depth - 1)))
