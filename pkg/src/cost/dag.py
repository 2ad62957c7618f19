"""
Cost DAGs: threads as sequences of unit-time vertices, connected by spawn
and join edges, plus the metrics the response-time bounds are stated in.

Vertex ids are plain ints, unique across the graph. An edge set beyond
spawn and join is carried for completeness but is always empty.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, NamedTuple, Optional, Tuple

import networkx as nx

from src.core.errors import EmptyThread, NameClash, ThreadNotInGraph
from src.core.priorities import PriorityOrder

logger = logging.getLogger(__name__)

THREAD, SPAWN, JOIN = "thread", "spawn", "join"


class ThreadEntry(NamedTuple):
    prio: str
    vertices: Tuple[int, ...]


@dataclass(frozen=True)
class CostDag:
    threads: Mapping[str, ThreadEntry]
    spawn_edges: FrozenSet[Tuple[int, str]]
    join_edges: FrozenSet[Tuple[str, int]]
    store: PriorityOrder = field(compare=False)
    aux_edges: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.aux_edges:
            raise ValueError("auxiliary edges are never populated")

    @classmethod
    def empty(cls, store: PriorityOrder) -> "CostDag":
        return cls({}, frozenset(), frozenset(), store)

    @classmethod
    def single(cls, store: PriorityOrder, thread: str, prio: str, vertex: int) -> "CostDag":
        return cls({thread: ThreadEntry(prio, (vertex,))}, frozenset(), frozenset(), store)

    def vertices(self) -> Iterator[int]:
        for entry in self.threads.values():
            yield from entry.vertices

    def size(self) -> int:
        return sum(len(entry.vertices) for entry in self.threads.values())

    def owner(self) -> Dict[int, Tuple[str, int]]:
        """vertex id -> (thread, index within thread)"""
        return {v: (name, k) for name, entry in self.threads.items() for k, v in enumerate(entry.vertices)}

    def prio_of_vertex(self) -> Dict[int, str]:
        return {v: entry.prio for entry in self.threads.values() for v in entry.vertices}

    def entry(self, thread: str) -> ThreadEntry:
        try:
            return self.threads[thread]
        except KeyError:
            raise ThreadNotInGraph(f"thread {thread} is not in the graph") from None

    def first(self, thread: str) -> int:
        entry = self.entry(thread)
        if not entry.vertices:
            raise EmptyThread(f"thread {thread} has no vertices")
        return entry.vertices[0]

    def last(self, thread: str) -> int:
        entry = self.entry(thread)
        if not entry.vertices:
            raise EmptyThread(f"thread {thread} has no vertices")
        return entry.vertices[-1]

    def spawner_of(self) -> Dict[str, int]:
        return {child: u for u, child in self.spawn_edges}


# ------------------------- composition -------------------------

def seq_compose(g1: CostDag, a: str, g2: CostDag) -> CostDag:
    """g1 then g2 in thread a: a's vertex sequences are concatenated, everything else is unioned."""
    shared = (set(g1.threads) & set(g2.threads)) - {a}
    if shared:
        raise NameClash(f"threads {sorted(shared)} occur on both sides of a composition")
    overlap = set(g1.vertices()) & set(g2.vertices())
    if overlap:
        raise NameClash(f"vertices {sorted(overlap)[:5]} occur on both sides of a composition")
    threads: Dict[str, ThreadEntry] = {**g1.threads, **g2.threads}
    left, right = g1.threads.get(a), g2.threads.get(a)
    if left is not None and right is not None:
        if left.prio != right.prio:
            raise NameClash(f"thread {a} has priority {left.prio} and {right.prio}")
        threads[a] = ThreadEntry(left.prio, left.vertices + right.vertices)
    return CostDag(threads, g1.spawn_edges | g2.spawn_edges, g1.join_edges | g2.join_edges, g1.store)


# ------------------------- graph views -------------------------

def to_networkx(g: CostDag) -> nx.DiGraph:
    """Vertices with `thread`, `index` and `prio` attributes; edges labelled by kind."""
    graph = nx.DiGraph()
    for name, entry in g.threads.items():
        for k, v in enumerate(entry.vertices):
            graph.add_node(v, thread=name, index=k, prio=entry.prio)
        for u, w in zip(entry.vertices, entry.vertices[1:]):
            graph.add_edge(u, w, kind=THREAD)
    for u, child in g.spawn_edges:
        if g.threads.get(child) and g.threads[child].vertices:
            graph.add_edge(u, g.threads[child].vertices[0], kind=SPAWN)
    for src, u in g.join_edges:
        if g.threads.get(src) and g.threads[src].vertices:
            graph.add_edge(g.threads[src].vertices[-1], u, kind=JOIN)
    return graph


def canonical(g: CostDag):
    """Id-free form: vertices as (thread, index)."""
    owner = g.owner()
    return (
        tuple(sorted((name, e.prio, len(e.vertices)) for name, e in g.threads.items())),
        frozenset((owner[u], child) for u, child in g.spawn_edges),
        frozenset((src, owner[u]) for src, u in g.join_edges),
    )


def spawn_tree_form(g: CostDag, root: str):
    """
    Canonical form with threads named by their position in the spawn tree:
    the root is (), and a thread spawned at vertex k of thread path p is p + (k,).
    """
    owner = g.owner()
    children: Dict[str, List[Tuple[int, str]]] = {}
    for u, child in g.spawn_edges:
        parent, k = owner[u]
        children.setdefault(parent, []).append((k, child))
    path: Dict[str, Tuple[int, ...]] = {root: ()}
    stack = [root]
    while stack:
        name = stack.pop()
        for k, child in sorted(children.get(name, [])):
            path[child] = path[name] + (k,)
            stack.append(child)
    missing = set(g.threads) - set(path)
    if missing:
        raise ThreadNotInGraph(f"threads {sorted(missing)} are not reachable from {root}")
    return (
        tuple(sorted((path[n], e.prio, len(e.vertices)) for n, e in g.threads.items())),
        frozenset(((path[owner[u][0]], owner[u][1]), path[child]) for u, child in g.spawn_edges),
        frozenset((path[src], (path[owner[u][0]], owner[u][1])) for src, u in g.join_edges),
    )


# ------------------------- metrics -------------------------

def priority_work(g: CostDag, rho: str, include_equal: bool = False) -> int:
    """
    Vertices whose priority is not <= rho. With include_equal, vertices at rho
    itself are counted too (the set of priorities not strictly below rho).
    """
    store = g.store
    count = 0
    for entry in g.threads.values():
        below = store.lt(entry.prio, rho) if include_equal else store.le(entry.prio, rho)
        if not below:
            count += len(entry.vertices)
    return count


def a_span(g: CostDag, a: str) -> int:
    """Length in vertices of the longest path ending at a's last vertex."""
    target = g.last(a)
    graph = to_networkx(g)
    relevant = nx.ancestors(graph, target) | {target}
    longest: Dict[int, int] = {}
    for v in nx.topological_sort(graph.subgraph(relevant)):
        longest[v] = 1 + max((longest[u] for u in graph.predecessors(v) if u in relevant), default=0)
    return longest[target]


def competitor_work(g: CostDag, a: str) -> CostDag:
    """g without the proper ancestors of a's first vertex and the proper descendants of its last."""
    graph = to_networkx(g)
    removed = nx.ancestors(graph, g.first(a)) | nx.descendants(graph, g.last(a))
    threads: Dict[str, ThreadEntry] = {}
    for name, entry in g.threads.items():
        kept = tuple(v for v in entry.vertices if v not in removed)
        if kept:
            threads[name] = ThreadEntry(entry.prio, kept)
    spawn = frozenset((u, child) for u, child in g.spawn_edges
                      if u not in removed and child in threads and g.threads[child].vertices[0] not in removed)
    join = frozenset((src, u) for src, u in g.join_edges
                     if u not in removed and src in threads and g.threads[src].vertices[-1] not in removed)
    return CostDag(threads, spawn, join, g.store)


# ------------------------- well-formedness -------------------------

@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[str] = None

    def __bool__(self) -> bool:
        return self.holds


def check_well_formed(g: CostDag) -> Verdict:
    """No thread depends on work of lower or incomparable priority while it is active."""
    graph = to_networkx(g)
    store = g.store
    for name, entry in g.threads.items():
        if not entry.vertices:
            continue
        first, last = entry.vertices[0], entry.vertices[-1]
        before_first = nx.ancestors(graph, first) | {first}
        for u in nx.ancestors(graph, last) | {last}:
            if u in before_first:
                continue
            prio = graph.nodes[u]["prio"]
            if not store.le(entry.prio, prio):
                node = graph.nodes[u]
                return Verdict(False, f"thread {name} ({entry.prio}) depends on {node['thread']}:{node['index']} ({prio})")
    return Verdict(True)


def check_strongly_well_formed(g: CostDag) -> Verdict:
    """
    Joins only go from higher to lower priority, and the spawner of a joined
    thread reaches the join point along a path starting with its own thread edge.
    """
    graph = to_networkx(g)
    store = g.store
    owner = g.owner()
    spawner = g.spawner_of()
    for src, u in sorted(g.join_edges, key=lambda e: (e[0], owner[e[1]])):
        dest, k = owner[u]
        src_prio, dest_prio = g.threads[src].prio, g.threads[dest].prio
        if not store.le(dest_prio, src_prio):
            return Verdict(False, f"join from {src} ({src_prio}) into {dest}:{k} ({dest_prio})")
        if src not in spawner:
            continue
        origin = spawner[src]
        thread, index = owner[origin]
        vertices = g.threads[thread].vertices
        if index + 1 >= len(vertices):
            return Verdict(False, f"spawner {thread}:{index} of {src} has no continuation to reach {dest}:{k}")
        successor = vertices[index + 1]
        if successor != u and not nx.has_path(graph, successor, u):
            return Verdict(False, f"no path from {thread}:{index} to {dest}:{k} for the join from {src}")
    return Verdict(True)
