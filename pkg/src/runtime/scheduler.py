"""
A deterministic simulation of P processors running a program promptly.

Each processor keeps one deque per priority level, levels ordered by the
store's linear extension. Every global step has three phases:

  1. balancing: a processor with two or more queued threads picks a random
     other processor and deals it one thread at a chosen level if that
     processor has nothing queued there;
  2. selection: levels are visited from highest to lowest; processors pop
     their own deque first (newest first), then idle processors steal the
     oldest thread from a random victim with work at that level;
  3. stepping: each selected thread takes one transition.

Threads whose next step is a sync on an unfinished thread are parked on that
thread and never occupy a processor; they are re-queued once it returns.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Dict, Iterable, List, Optional, Tuple

import numpy as np

from src.core import terms as T
from src.core.actions import Action, RetOf
from src.core.errors import AuditFailure, Blocked, Deadlock, FuelExhausted, PrimlError, Stuck
from src.core.names import ThreadNames
from src.core.priorities import PriorityOrder
from src.core.settings import get_settings
from src.runtime.pool import ThreadPool
from src.runtime.stepper import IOPort, is_finished, step_cmd, sync_target
from src.statics.typechecker import check_program, type_action, type_threadpool

logger = logging.getLogger(__name__)

DEAL_POLICIES = ("uniform", "lowest")


@dataclass(frozen=True)
class TraceEvent:
    step: int
    proc: int
    thread: str
    action: Action
    spawned: Tuple[str, ...] = ()


@dataclass
class RunResult:
    value: Optional[T.Expr]
    outputs: List[int]
    response_times: Dict[str, int]
    steps: int
    trace: List[TraceEvent]
    thread_prios: Dict[str, str]
    spawn_steps: Dict[str, int]
    finish_steps: Dict[str, int]
    procs: int
    audit_report: List[str] = field(default_factory=list)
    store: Optional[PriorityOrder] = None


class Scheduler:
    """Owns the per-processor deques and the pool for one run."""

    def __init__(self, store: PriorityOrder, procs: int, seed: int, deal: str = "uniform"):
        if procs < 1:
            raise ValueError("need at least one processor")
        if deal not in DEAL_POLICIES:
            raise ValueError(f"unknown deal policy {deal!r}; choose from {DEAL_POLICIES}")
        self.store = store
        self.procs = procs
        self.deal = deal
        self.rng = np.random.default_rng(seed)
        self.levels = store.total_order()
        self.level_of = {name: k for k, name in enumerate(self.levels)}
        self.deques: List[List[Deque[str]]] = [[deque() for _ in self.levels] for _ in range(procs)]
        self.pool = ThreadPool()
        self.names = ThreadNames()
        self.waiters: Dict[str, List[str]] = {}

    # ------------------------- queues -------------------------

    def _level(self, thread: str) -> int:
        prio = self.pool.prio_of(thread)
        if not isinstance(prio, T.PConst):
            raise Stuck(f"thread {thread} runs at a priority variable {prio.name}")
        return self.level_of[prio.name]

    def push(self, proc: int, thread: str) -> None:
        self.deques[proc][self._level(thread)].append(thread)

    def queued(self, proc: int) -> int:
        return sum(len(d) for d in self.deques[proc])

    def _park_or_take(self, thread: str) -> bool:
        """Park thread if it would block; True when it can run now."""
        target = self.pool.waiting_on(thread)
        if target is None:
            return True
        self.waiters.setdefault(target, []).append(thread)
        logger.debug(f"Parked {thread} on {target}")
        return False

    # ------------------------- phases -------------------------

    def balance(self) -> None:
        if self.procs < 2:
            return
        for p in range(self.procs):
            if self.queued(p) < 2:
                continue
            q = int(self.rng.integers(self.procs - 1))
            q = q + 1 if q >= p else q
            slots = [k for k, d in enumerate(self.deques[p]) if d]
            level = slots[0] if self.deal == "lowest" else slots[int(self.rng.integers(len(slots)))]
            if not self.deques[q][level]:
                thread = self.deques[p][level].popleft()
                self.deques[q][level].append(thread)
                logger.debug(f"Dealt {thread} from processor {p} to {q}")

    def select(self) -> List[Tuple[int, str]]:
        chosen: Dict[int, str] = {}
        for level in reversed(range(len(self.levels))):
            if len(chosen) == self.procs:
                break
            for p in range(self.procs):
                if p in chosen:
                    continue
                local = self.deques[p][level]
                while local:
                    thread = local.pop()
                    if self._park_or_take(thread):
                        chosen[p] = thread
                        break
            for p in range(self.procs):
                if p in chosen:
                    continue
                while True:
                    victims = [q for q in range(self.procs) if q != p and self.deques[q][level]]
                    if not victims:
                        break
                    victim = victims[int(self.rng.integers(len(victims)))]
                    thread = self.deques[victim][level].popleft()
                    if self._park_or_take(thread):
                        chosen[p] = thread
                        break
        return sorted(chosen.items())

    # ------------------------- driver -------------------------

    def run(self, m0: T.Cmd, io: IOPort, fuel: int, join_all: bool = False, audit: bool = False,
            audit_report: Optional[List[str]] = None) -> RunResult:
        root = ThreadNames.ROOT
        root_ty = check_program(self.store, m0) if audit else T.UNIT
        self.pool.add(root, T.BOT, m0, root_ty)
        self.push(0, root)
        spawn_steps: Dict[str, int] = {root: 0}
        finish_steps: Dict[str, int] = {}
        trace: List[TraceEvent] = []
        audit_report = audit_report if audit_report is not None else []
        step = 0

        while True:
            if root in self.pool.retained and (not join_all or not self.pool.threads):
                break
            if step >= fuel:
                raise FuelExhausted(f"no result after {fuel} steps")
            step += 1
            self.balance()
            selected = self.select()
            if not selected:
                blocked = sorted(self.pool.threads)
                raise Deadlock(f"no thread can run at step {step}; waiting: {', '.join(blocked)}")

            for proc, thread in selected:
                try:
                    action, spawned = self.pool.step(thread, io, self.names)
                except Blocked as b:
                    self.waiters.setdefault(b.thread, []).append(thread)
                    continue
                trace.append(TraceEvent(step, proc, thread, action, tuple(c.name for c in spawned)))
                for child in spawned:
                    spawn_steps[child.name] = step
                    self.push(proc, child.name)
                if isinstance(action, RetOf):
                    finish_steps[thread] = step
                    for waiter in self.waiters.pop(thread, []):
                        self.push(proc, waiter)
                else:
                    self.push(proc, thread)
                if audit:
                    self._audit(action, step, audit_report)
            logger.debug(f"Step {step}: ran {[t for _, t in selected]}")

        response = {t: finish_steps[t] - spawn_steps[t] for t in finish_steps}
        logger.info(f"Run finished after {step} steps; {len(self.pool.sig)} threads, {len(finish_steps)} returned")
        return RunResult(
            value=self.pool.retained.get(root),
            outputs=list(io.outputs),
            response_times=response,
            steps=step,
            trace=trace,
            thread_prios={t: e.prio.name for t, e in self.pool.sig.items()},
            spawn_steps=spawn_steps,
            finish_steps=finish_steps,
            procs=self.procs,
            audit_report=audit_report,
            store=self.store,
        )

    def _audit(self, action: Action, step: int, report: List[str]) -> None:
        """Re-type the whole pool and the action; every running thread must be able to step."""
        try:
            type_threadpool(self.store, {}, self.pool)
            type_action(self.store, self.pool.sig, action)
        except PrimlError as e:
            raise AuditFailure(f"step {step}: pool no longer types: {e}") from e
        for name in self.pool.threads:
            target = sync_target(self.pool.threads[name][1])
            if target is not None and target not in self.pool.sig:
                raise AuditFailure(f"step {step}: thread {name} syncs with unknown thread {target}")
        self._check_progress(step)
        report.append(f"step {step}: ok ({len(self.pool.threads)} running)")

    def _check_progress(self, step: int) -> None:
        """Every running thread has returned, is parked on an unfinished thread, or can take a step."""
        for name, (_, cmd) in self.pool.threads.items():
            if is_finished(cmd) or self.pool.waiting_on(name) is not None:
                continue
            try:
                step_cmd(self.pool.sig, cmd, IOPort.of([0]), self.pool.retained, ThreadNames())
            except Blocked:
                continue
            except Stuck as e:
                raise AuditFailure(f"step {step}: thread {name} cannot step: {e}") from e


def run(store: PriorityOrder, m0: T.Cmd, procs: int = 1, seed: int = 0, inputs: Iterable[int] = (),
        fuel: Optional[int] = None, join_all: bool = False, audit: bool = False, deal: str = "uniform",
        on_output: Optional[Callable[[int], None]] = None, audit_report: Optional[List[str]] = None) -> RunResult:
    """
    Run m0 (a command typed at bot) to completion of its main thread.
    With audit, one line per audited step is appended to audit_report as the run goes.
    """
    fuel = fuel if fuel is not None else get_settings().fuel
    io = IOPort.of(inputs, on_output)
    return Scheduler(store, procs, seed, deal).run(m0, io, fuel, join_all, audit, audit_report)
