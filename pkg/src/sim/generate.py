"""Random strongly well-formed cost DAGs for property tests and the simulator."""
import logging
from typing import Dict, List, Tuple

import networkx as nx
import numpy as np

from src.core.priorities import PriorityOrder
from src.cost.dag import CostDag, ThreadEntry, to_networkx

logger = logging.getLogger(__name__)


def random_wellformed_dag(n_threads: int, max_len: int, store: PriorityOrder, seed=0,
                          join_rate: float = 0.6) -> CostDag:
    """
    A spawn tree of n_threads threads (the root is `main`) with random
    priorities, plus join edges that only go from a thread to threads of lower
    or equal priority and only land where the joined thread's spawner can
    reach along its own continuation.
    """
    if n_threads < 1 or max_len < 1:
        raise ValueError("need at least one thread of at least one vertex")
    if n_threads > 1 and max_len < 2:
        raise ValueError("spawning threads need at least two vertices")
    rng = np.random.default_rng(seed)
    prios = list(store.names)
    names = ["main"] + [f"t{k}" for k in range(1, n_threads)]
    lengths = [int(rng.integers(1, max_len + 1)) for _ in names]
    if n_threads > 1:
        lengths[0] = max(lengths[0], 2)

    threads: Dict[str, ThreadEntry] = {}
    next_id = 0
    for name, n in zip(names, lengths):
        prio = prios[int(rng.integers(len(prios)))]
        threads[name] = ThreadEntry(prio, tuple(range(next_id, next_id + n)))
        next_id += n

    spawns: List[Tuple[int, str]] = []
    spawner: Dict[str, Tuple[str, int]] = {}
    for k in range(1, n_threads):
        parents = [names[j] for j in range(k) if len(threads[names[j]].vertices) >= 2]
        parent = parents[int(rng.integers(len(parents)))]
        index = int(rng.integers(len(threads[parent].vertices) - 1))
        spawns.append((threads[parent].vertices[index], names[k]))
        spawner[names[k]] = (parent, index)

    g = CostDag(threads, frozenset(spawns), frozenset(), store)
    graph = to_networkx(g)
    joins = set()
    for child in rng.permutation(names[1:]):
        child = str(child)
        if rng.random() >= join_rate:
            continue
        parent, index = spawner[child]
        start = threads[parent].vertices[index + 1]
        reach = nx.descendants(graph, start) | {start}
        last = threads[child].vertices[-1]
        blocked = nx.ancestors(graph, last) | {last}
        options = sorted(
            u for u in reach - blocked
            if graph.nodes[u]["thread"] != child
            and store.le(graph.nodes[u]["prio"], threads[child].prio)
        )
        if not options:
            continue
        u = options[int(rng.integers(len(options)))]
        joins.add((child, u))
        graph.add_edge(last, u, kind="join")
    logger.debug(f"Generated DAG: {n_threads} threads, {next_id} vertices, {len(joins)} joins")
    return CostDag(threads, frozenset(spawns), frozenset(joins), store)
