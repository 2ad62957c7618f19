"""
Line-oriented text form of cost DAGs.

    prio <name>
    ord <lo> <hi>
    thread <name> <prio> <n>
    spawn <thread>:<index> <child>
    join <src> <thread>:<index>

Indices are 0-based. `#` starts a comment; blank lines are ignored. `bot`
is always present and is not declared. Vertex ids are assigned in thread
declaration order.
"""
import logging
from typing import Dict, List, Tuple

import networkx as nx

from src.core import terms as T
from src.core.errors import DagFormatError, EmptyThread, PrimlError
from src.core.priorities import PriorityOrder
from src.cost.dag import CostDag, ThreadEntry, to_networkx

logger = logging.getLogger(__name__)


def _position(token: str, line: int) -> Tuple[str, int]:
    name, sep, index = token.rpartition(":")
    if not sep or not name or not index.isdigit():
        raise DagFormatError(f"expected <thread>:<index>, found {token!r}", line)
    return name, int(index)


def _count(token: str, line: int) -> int:
    if not token.isdigit():
        raise DagFormatError(f"expected a vertex count, found {token!r}", line)
    return int(token)


def parse_dag(text: str) -> CostDag:
    store = PriorityOrder()
    threads: Dict[str, ThreadEntry] = {}
    spawns: List[Tuple[int, Tuple[str, int], str]] = []
    joins: List[Tuple[int, str, Tuple[str, int]]] = []
    next_id = 0
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        keyword, args = words[0], words[1:]
        arity = {"prio": 1, "ord": 2, "thread": 3, "spawn": 2, "join": 2}.get(keyword)
        if arity is None:
            raise DagFormatError(f"unknown directive {keyword!r}", lineno)
        if len(args) != arity:
            raise DagFormatError(f"{keyword} takes {arity} arguments, found {len(args)}", lineno)
        try:
            if keyword == "prio":
                store.declare_priority(args[0])
            elif keyword == "ord":
                store.declare_order(args[0], args[1])
        except PrimlError as e:
            raise DagFormatError(e.message, lineno) from e
        if keyword == "thread":
            name, prio, n = args[0], args[1], _count(args[2], lineno)
            if name in threads:
                raise DagFormatError(f"thread {name} is declared twice", lineno)
            if prio not in store:
                raise DagFormatError(f"unknown priority {prio}", lineno)
            if n == 0:
                raise EmptyThread(f"line {lineno}: thread {name} has no vertices")
            threads[name] = ThreadEntry(prio, tuple(range(next_id, next_id + n)))
            next_id += n
        elif keyword == "spawn":
            spawns.append((lineno, _position(args[0], lineno), args[1]))
        elif keyword == "join":
            joins.append((lineno, args[0], _position(args[1], lineno)))

    def vertex(line: int, pos: Tuple[str, int]) -> int:
        name, index = pos
        if name not in threads:
            raise DagFormatError(f"unknown thread {name}", line)
        vertices = threads[name].vertices
        if index >= len(vertices):
            raise DagFormatError(f"thread {name} has no vertex {index}", line)
        return vertices[index]

    def known(line: int, name: str) -> str:
        if name not in threads:
            raise DagFormatError(f"unknown thread {name}", line)
        return name

    spawned: Dict[str, int] = {}
    spawn_edges = set()
    for line, pos, child in spawns:
        if known(line, child) in spawned:
            raise DagFormatError(f"thread {child} is spawned twice", line)
        spawned[child] = line
        spawn_edges.add((vertex(line, pos), child))
    join_edges = {(known(line, src), vertex(line, pos)) for line, src, pos in joins}

    g = CostDag(threads, frozenset(spawn_edges), frozenset(join_edges), store)
    if not nx.is_directed_acyclic_graph(to_networkx(g)):
        raise DagFormatError("the edges form a cycle", lineno)
    logger.debug(f"Read DAG: {len(threads)} threads, {next_id} vertices")
    return g


def format_dag(g: CostDag) -> str:
    """Inverse of parse_dag up to vertex ids."""
    store = g.store
    owner = g.owner()
    lines = [f"prio {name}" for name in store.names if name != T.BOT_NAME]
    lines += [f"ord {lo} {hi}" for lo, hi in store.edges]
    lines += [f"thread {name} {entry.prio} {len(entry.vertices)}" for name, entry in g.threads.items()]
    for u, child in sorted(g.spawn_edges, key=lambda e: (owner[e[0]], e[1])):
        thread, index = owner[u]
        lines.append(f"spawn {thread}:{index} {child}")
    for src, u in sorted(g.join_edges, key=lambda e: (e[0], owner[e[1]])):
        thread, index = owner[u]
        lines.append(f"join {src} {thread}:{index}")
    return "\n".join(lines) + "\n"
