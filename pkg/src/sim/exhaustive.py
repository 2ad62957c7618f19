"""Minimum response time over every valid schedule, for tiny graphs."""
import itertools
import logging
from collections import deque
from typing import Dict, List

from src.core.errors import TooLarge
from src.cost.dag import CostDag, to_networkx

logger = logging.getLogger(__name__)

MAX_VERTICES = 14


def exhaustive_min_response(g: CostDag, a: str, procs: int) -> int:
    """
    Search over executed-vertex sets. A step costs 1 once a's first vertex is
    ready and 0 before, so a 0-1 breadth-first search finds the least T(a).
    Schedules need not be greedy: any nonempty set of at most procs ready
    vertices is a step.
    """
    graph = to_networkx(g)
    order: List[int] = sorted(graph.nodes)
    if len(order) > MAX_VERTICES:
        raise TooLarge(f"{len(order)} vertices; the exhaustive search stops at {MAX_VERTICES}")
    bit = {v: 1 << k for k, v in enumerate(order)}
    preds = {v: sum(bit[u] for u in graph.predecessors(v)) for v in order}
    first_preds = preds[g.first(a)]
    goal = bit[g.last(a)]

    best: Dict[int, int] = {0: 0}
    queue = deque([0])
    while queue:
        mask = queue.popleft()
        cost = best[mask]
        if mask & goal:
            logger.debug(f"Exhaustive search visited {len(best)} states")
            return cost
        weight = 1 if mask & first_preds == first_preds else 0
        ready = [v for v in order if not mask & bit[v] and mask & preds[v] == preds[v]]
        for size in range(1, min(procs, len(ready)) + 1):
            for chosen in itertools.combinations(ready, size):
                nxt = mask | sum(bit[v] for v in chosen)
                if nxt in best and best[nxt] <= cost + weight:
                    continue
                best[nxt] = cost + weight
                if weight:
                    queue.append(nxt)
                else:
                    queue.appendleft(nxt)
    raise ValueError(f"thread {a} can never finish")
