"""
Export an evaluator run as a cost DAG and the schedule that executed it.

Every trace event is one vertex of its thread. A step that spawned a child
gets a spawn edge to it, and a sync that read a result gets a join edge from
the target's return. Step k of the schedule is the set of vertices executed
at evaluator step k. Runs made with join_all give the complete graph.
"""
import logging
from typing import Dict, List, Tuple

from src.core.actions import SyncFrom
from src.cost.dag import CostDag, ThreadEntry
from src.runtime.scheduler import RunResult
from src.sim.schedule import Schedule

logger = logging.getLogger(__name__)


def export_trace(result: RunResult) -> Tuple[CostDag, Schedule]:
    vertices: Dict[str, List[int]] = {}
    steps: List[List[int]] = [[] for _ in range(result.steps)]
    spawn_edges = set()
    join_edges = set()
    for vertex, event in enumerate(result.trace):
        vertices.setdefault(event.thread, []).append(vertex)
        steps[event.step - 1].append(vertex)
        for child in event.spawned:
            spawn_edges.add((vertex, child))
        if isinstance(event.action, SyncFrom):
            join_edges.add((event.action.thread, vertex))

    threads = {name: ThreadEntry(result.thread_prios[name], tuple(vs)) for name, vs in vertices.items()}
    dag = CostDag(
        threads,
        frozenset((u, child) for u, child in spawn_edges if child in threads),
        frozenset(join_edges),
        result.store,
    )
    logger.debug(f"Exported trace: {len(threads)} threads, {len(result.trace)} vertices")
    return dag, Schedule(tuple(frozenset(step) for step in steps), result.procs)
