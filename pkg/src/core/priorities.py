"""
The priority store: declared priority constants, the programmer's ordering
edges, their reflexive-transitive closure and a deterministic linear extension,
plus constraint entailment over constants and priority variables.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np

from src.core.errors import CycleDetected, DuplicatePriority, SourceSpan, UnknownPriority
from src.core.terms import BOT_NAME, Constraint, Le, PConst, Priority, PVar

logger = logging.getLogger(__name__)


def warshall(adjacency: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a boolean adjacency matrix."""
    reach = adjacency.astype(bool) | np.eye(adjacency.shape[0], dtype=bool)
    for k in range(reach.shape[0]):
        reach |= np.outer(reach[:, k], reach[k, :])
    return reach


class PriorityOrder:
    """
    Declared priorities and the partial order between them.

    `bot` is always present and below every other constant. The closure matrix
    is maintained incrementally on every insert and is indexed by declaration
    order.
    """

    def __init__(self):
        self._index: Dict[str, int] = {BOT_NAME: 0}
        self._names: List[str] = [BOT_NAME]
        self._edges: List[Tuple[str, str]] = []
        self._closure = np.ones((1, 1), dtype=bool)
        self._total: Optional[List[str]] = None

    # ------------------------- construction -------------------------

    def declare_priority(self, name: str, span: Optional[SourceSpan] = None) -> "PriorityOrder":
        if name in self._index:
            raise DuplicatePriority(f"priority {name} is already declared", span)
        n = len(self._names)
        self._index[name] = n
        self._names.append(name)
        grown = np.zeros((n + 1, n + 1), dtype=bool)
        grown[:n, :n] = self._closure
        grown[n, n] = True
        grown[0, n] = True  # bot <= name
        self._closure = grown
        self._total = None
        logger.debug(f"Declared priority {name}")
        return self

    def declare_order(self, lo: str, hi: str, span: Optional[SourceSpan] = None) -> "PriorityOrder":
        i, j = self._require(lo, span), self._require(hi, span)
        if self._closure[j, i]:
            raise CycleDetected(lo, hi, span)
        self._edges.append((lo, hi))
        self._closure |= np.outer(self._closure[:, i], self._closure[j, :])
        self._total = None
        logger.debug(f"Declared order {lo} < {hi}")
        return self

    def copy(self) -> "PriorityOrder":
        other = PriorityOrder()
        other._index = dict(self._index)
        other._names = list(self._names)
        other._edges = list(self._edges)
        other._closure = self._closure.copy()
        return other

    # ------------------------- queries -------------------------

    def _require(self, name: str, span: Optional[SourceSpan] = None) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownPriority(f"unknown priority {name}", span) from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @property
    def names(self) -> Tuple[str, ...]:
        """Constants in declaration order, bot first."""
        return tuple(self._names)

    @property
    def edges(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(self._edges)

    @property
    def closure(self) -> np.ndarray:
        return self._closure.copy()

    def le(self, lo: str, hi: str) -> bool:
        return bool(self._closure[self._require(lo), self._require(hi)])

    def lt(self, lo: str, hi: str) -> bool:
        return lo != hi and self.le(lo, hi)

    def total_order(self) -> List[str]:
        """
        Linear extension, lowest first. Ties go to the earlier declaration, so
        for `bot < a, bot < b, a < c` declared a, b, c the result is
        [bot, a, b, c].
        """
        if self._total is None:
            graph = nx.DiGraph()
            graph.add_nodes_from(self._names)
            graph.add_edges_from((BOT_NAME, name) for name in self._names[1:])
            graph.add_edges_from(self._edges)
            self._total = list(nx.lexicographical_topological_sort(graph, key=self._index.__getitem__))
        return list(self._total)

    def rank(self) -> Dict[str, int]:
        """Position of each constant in total_order (higher rank, higher priority)."""
        return {name: k for k, name in enumerate(self.total_order())}

    def __repr__(self) -> str:
        order = ", ".join(f"{lo} < {hi}" for lo, hi in self._edges)
        return f"PriorityOrder({list(self._names)}; {order})"


# ------------------------- entailment -------------------------

@dataclass(frozen=True)
class EntailContext:
    """The priority part of a typing context: bound priority variables and assumed facts."""
    prio_vars: FrozenSet[str] = frozenset()
    assumed: FrozenSet[Tuple[Priority, Priority]] = field(default_factory=frozenset)

    def extend(self, var: Optional[str] = None, constraint: Optional[Constraint] = None) -> "EntailContext":
        prio_vars = self.prio_vars | {var} if var is not None else self.prio_vars
        assumed = self.assumed
        if constraint is not None:
            assumed = assumed | {(c.lhs, c.rhs) for c in constraint.conjuncts}
        return EntailContext(prio_vars, assumed)


def _check_atom(store: PriorityOrder, ctx: EntailContext, p: Priority) -> None:
    if isinstance(p, PConst):
        if p.name not in store:
            raise UnknownPriority(f"unknown priority {p.name}")
    elif isinstance(p, PVar):
        if p.name not in ctx.prio_vars:
            raise UnknownPriority(f"unbound priority variable {p.name}")
    else:
        raise TypeError(f"not a priority: {p!r}")


def _fact_graph(store: PriorityOrder, ctx: EntailContext) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_edges_from((PConst(BOT_NAME), PConst(name)) for name in store.names[1:])
    graph.add_edges_from((PConst(lo), PConst(hi)) for lo, hi in store.edges)
    graph.add_edges_from(ctx.assumed)
    return graph


def entails_le(store: PriorityOrder, ctx: EntailContext, lhs: Priority, rhs: Priority) -> bool:
    return entails(store, ctx, Constraint((Le(lhs, rhs),)))


def entails(store: PriorityOrder, ctx: EntailContext, goal: Constraint) -> bool:
    """
    Decide ctx |- goal. Facts are the assumed pairs of ctx plus the store's
    edges (and bot below every constant); a conjunct holds when it is
    reflexive or its lhs reaches its rhs through facts.
    """
    for conj in goal.conjuncts:
        _check_atom(store, ctx, conj.lhs)
        _check_atom(store, ctx, conj.rhs)
    graph: Optional[nx.DiGraph] = None
    for conj in goal.conjuncts:
        if conj.lhs == conj.rhs:
            continue
        if isinstance(conj.lhs, PConst) and isinstance(conj.rhs, PConst) and store.le(conj.lhs.name, conj.rhs.name):
            continue
        if graph is None:
            graph = _fact_graph(store, ctx)
        if conj.lhs not in graph or not nx.has_path(graph, conj.lhs, conj.rhs):
            return False
    return True


def ctxify(store: PriorityOrder) -> Tuple[EntailContext, PriorityOrder]:
    """
    Load the store's bindings into a context: returns that context together
    with a store holding only the constants and no ordering facts.
    """
    bare = PriorityOrder()
    for name in store.names[1:]:
        bare.declare_priority(name)
    assumed = {(PConst(BOT_NAME), PConst(name)) for name in store.names[1:]}
    assumed |= {(PConst(lo), PConst(hi)) for lo, hi in store.edges}
    return EntailContext(frozenset(), frozenset(assumed)), bare


def order_from(priorities: Iterable[str], edges: Iterable[Tuple[str, str]]) -> PriorityOrder:
    store = PriorityOrder()
    for name in priorities:
        if name != BOT_NAME:
            store.declare_priority(name)
    for lo, hi in edges:
        store.declare_order(lo, hi)
    return store
