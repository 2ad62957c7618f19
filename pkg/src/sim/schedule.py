"""
Offline schedules of cost DAGs on P processors.

A schedule is a list of steps, each a set of at most P vertices. Steps are
numbered from 1; a vertex is ready at step k when all of its predecessors ran
in steps before k.
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Sequence, Set, Union

import numpy as np

from src.core.errors import ThreadNotInGraph
from src.cost.dag import CostDag, Verdict, to_networkx

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator, None]
FAIR_MODES = ("sample", "split")


@dataclass(frozen=True)
class Schedule:
    steps: Sequence[FrozenSet[int]]
    procs: int

    def __len__(self) -> int:
        return len(self.steps)

    def step_of(self) -> Dict[int, int]:
        """vertex -> 1-based step at which it ran"""
        return {v: k for k, step in enumerate(self.steps, start=1) for v in step}


class _Frontier:
    """Ready vertices of a DAG as steps complete."""

    def __init__(self, g: CostDag):
        self.graph = to_networkx(g)
        self.waiting = {v: self.graph.in_degree(v) for v in self.graph.nodes}
        self.ready: Set[int] = {v for v, d in self.waiting.items() if d == 0}
        self.remaining = self.graph.number_of_nodes()

    def complete(self, step: Set[int]) -> None:
        self.ready -= step
        self.remaining -= len(step)
        for v in step:
            for w in self.graph.successors(v):
                self.waiting[w] -= 1
                if self.waiting[w] == 0:
                    self.ready.add(w)


class _PromptPicker:
    """Chooses ready vertices so that nothing strictly higher is left unassigned."""

    def __init__(self, g: CostDag, rng: np.random.Generator, det: bool):
        self.store = g.store
        self.rng = rng
        self.det = det
        self.prio = g.prio_of_vertex()
        self.owner = g.owner()
        self.rank = g.store.rank()

    def candidates(self, pool: Set[int]) -> List[int]:
        prios = {self.prio[v] for v in pool}
        top = {p for p in prios if not any(self.store.lt(p, q) for q in prios)}
        return [v for v in pool if self.prio[v] in top]

    def pick(self, pool: Set[int]) -> int:
        options = self.candidates(pool)
        if self.det:
            return min(options, key=lambda v: (-self.rank[self.prio[v]], self.owner[v]))
        options.sort()
        return options[int(self.rng.integers(len(options)))]

    def fill(self, assigned: Set[int], pool: Set[int], procs: int) -> None:
        while len(assigned) < procs and pool:
            v = self.pick(pool)
            pool.discard(v)
            assigned.add(v)


def prompt_schedule(g: CostDag, procs: int, seed: Seed = 0, det: bool = False) -> Schedule:
    """
    Greedy and prompt: each step repeatedly takes a ready vertex of maximal
    priority among the unassigned ones. Ties are broken by the seeded
    generator, or by the total order and then thread position under det.
    """
    if procs < 1:
        raise ValueError("need at least one processor")
    frontier = _Frontier(g)
    picker = _PromptPicker(g, np.random.default_rng(seed), det)
    steps: List[FrozenSet[int]] = []
    while frontier.remaining:
        assigned: Set[int] = set()
        picker.fill(assigned, set(frontier.ready), procs)
        if not assigned:
            raise ValueError("no vertex is ready; the graph has a cycle")
        steps.append(frozenset(assigned))
        frontier.complete(assigned)
    logger.debug(f"Prompt schedule: {len(steps)} steps on {procs} processors")
    return Schedule(tuple(steps), procs)


def _split(weights: Dict[str, float], procs: int, step: int) -> List[str]:
    """Largest-remainder apportionment of procs; leftover processors rotate with the step."""
    names = sorted(weights)
    exact = {p: weights[p] * procs for p in names}
    counts = {p: int(np.floor(exact[p])) for p in names}
    leftover = procs - sum(counts.values())
    ranked = sorted((p for p in names if weights[p] > 0), key=lambda p: (-(exact[p] - counts[p]), p))
    if ranked:
        start = step % len(ranked)
        for j in range(leftover):
            counts[ranked[(start + j) % len(ranked)]] += 1
    return [p for p in names for _ in range(counts[p])]


def fair_prompt_schedule(g: CostDag, procs: int, criterion, seed: Seed = 0, mode: str = "sample") -> Schedule:
    """
    Each step assigns every processor a priority drawn from the criterion. A
    processor runs a ready vertex of its priority when there is one; the rest
    fall back to the prompt policy.
    """
    if mode not in FAIR_MODES:
        raise ValueError(f"unknown fair mode {mode!r}; choose from {FAIR_MODES}")
    if procs < 1:
        raise ValueError("need at least one processor")
    rng = np.random.default_rng(seed)
    frontier = _Frontier(g)
    picker = _PromptPicker(g, rng, det=False)
    names = sorted(criterion.weights)
    probs = np.array([criterion.weights[p] for p in names], dtype=float)
    probs = probs / probs.sum()
    steps: List[FrozenSet[int]] = []
    while frontier.remaining:
        if mode == "sample":
            drawn = [names[k] for k in rng.choice(len(names), size=procs, p=probs)]
        else:
            drawn = _split(criterion.weights, procs, len(steps))
        pool = set(frontier.ready)
        assigned: Set[int] = set()
        for prio in drawn:
            matching = sorted(v for v in pool if picker.prio[v] == prio)
            if matching:
                v = matching[int(rng.integers(len(matching)))]
                pool.discard(v)
                assigned.add(v)
        picker.fill(assigned, pool, procs)
        if not assigned:
            raise ValueError("no vertex is ready; the graph has a cycle")
        steps.append(frozenset(assigned))
        frontier.complete(assigned)
    return Schedule(tuple(steps), procs)


# ------------------------- measurement -------------------------

def response_time(sched: Schedule, g: CostDag, a: str) -> int:
    """Steps from when a's first vertex is ready (exclusive) to when its last runs (inclusive)."""
    if a not in g.threads:
        raise ThreadNotInGraph(f"thread {a} is not in the graph")
    first, last = g.first(a), g.last(a)
    ran = sched.step_of()
    if last not in ran:
        raise ThreadNotInGraph(f"thread {a} is not scheduled")
    graph = to_networkx(g)
    ready = max((ran[u] for u in graph.predecessors(first)), default=0)
    return ran[last] - ready


def response_times(sched: Schedule, g: CostDag) -> Dict[str, int]:
    return {a: response_time(sched, g, a) for a in g.threads}


# ------------------------- predicates -------------------------

def _replay(sched: Schedule, g: CostDag):
    """Yield (step number, ready set before the step, step)."""
    frontier = _Frontier(g)
    for k, step in enumerate(sched.steps, start=1):
        yield k, set(frontier.ready), step
        frontier.complete(set(step))


def check_valid(sched: Schedule, g: CostDag) -> Verdict:
    seen: Set[int] = set()
    vertices = set(g.vertices())
    for k, ready, step in _replay(sched, g):
        if len(step) > sched.procs:
            return Verdict(False, f"step {k} runs {len(step)} vertices on {sched.procs} processors")
        for v in step:
            if v in seen or v not in vertices:
                return Verdict(False, f"vertex {v} runs twice or is not in the graph")
            if v not in ready:
                return Verdict(False, f"vertex {v} runs at step {k} before it is ready")
        seen |= step
    if seen != vertices:
        return Verdict(False, f"{len(vertices - seen)} vertices never run")
    return Verdict(True)


def check_greedy(sched: Schedule, g: CostDag) -> Verdict:
    for k, ready, step in _replay(sched, g):
        if len(step) != min(sched.procs, len(ready)):
            return Verdict(False, f"step {k} runs {len(step)} of {len(ready)} ready vertices")
    return Verdict(True)


def check_prompt(sched: Schedule, g: CostDag) -> Verdict:
    """Greedy, and no ready vertex left out of a step has strictly higher priority than one run in it."""
    greedy = check_greedy(sched, g)
    if not greedy:
        return greedy
    prio = g.prio_of_vertex()
    store = g.store
    for k, ready, step in _replay(sched, g):
        left = {prio[v] for v in ready - set(step)}
        for v in step:
            for p in left:
                if store.lt(prio[v], p):
                    return Verdict(False, f"step {k} runs {prio[v]} work while {p} work is ready")
    return Verdict(True)
