"""
The cost semantics: evaluate a program to its value and cost DAG.

Expressions cost one vertex per reduction. Commands thread a record of the
values of spawned threads and a signature through evaluation; spawned
threads are costed eagerly and completely before their parent continues.
Every thread ends with one terminal vertex for its return.

Appending to the current thread while it is being costed is sequential
composition at that thread; spawned subgraphs are disjoint unions.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

from src.core import terms as T
from src.core.errors import AuditFailure, FuelExhausted, PrimlError, Stuck, UnknownThread
from src.core.names import ThreadNames
from src.core.pretty import show_expr, show_type
from src.core.priorities import PriorityOrder
from src.core.settings import get_settings
from src.core.subst import alpha_equal, subst_expr
from src.cost.dag import CostDag, ThreadEntry
from src.runtime.stepper import IOPort, contract
from src.statics.typechecker import EMPTY_CONTEXT, SigEntry, type_expr

logger = logging.getLogger(__name__)


class RecordEntry(NamedTuple):
    value: T.Expr
    spawned: Dict[str, SigEntry]


ThreadRecord = Dict[str, RecordEntry]


class ExprCost(NamedTuple):
    value: T.Expr
    vertices: Tuple[int, ...]


class CmdCost(NamedTuple):
    value: T.Expr
    dag: CostDag
    record: ThreadRecord
    sig: Dict[str, SigEntry]


class ProgramCost(NamedTuple):
    value: T.Expr
    dag: CostDag
    record: ThreadRecord
    sig: Dict[str, SigEntry]
    outputs: List[int]


class Fuel:
    """Shared vertex budget."""

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def burn(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise FuelExhausted(f"cost semantics did not finish within {self.limit} vertices")


@dataclass
class _Thread:
    prio: str
    vertices: List[int] = field(default_factory=list)


class CostBuilder:
    """Mutable state of one costing run: vertex ids, thread names, the growing graph and the record."""

    def __init__(self, store: PriorityOrder, io: Optional[IOPort] = None, fuel: Optional[int] = None,
                 names: Optional[ThreadNames] = None):
        self.store = store
        self.io = io if io is not None else IOPort()
        self.fuel = Fuel(fuel if fuel is not None else get_settings().fuel)
        self.names = names if names is not None else ThreadNames()
        self._ids = itertools.count()
        self.threads: Dict[str, _Thread] = {}
        self.spawn_edges: set = set()
        self.join_edges: set = set()
        self.record: ThreadRecord = {}
        self.declared: Dict[str, SigEntry] = {}

    def vertex(self) -> int:
        self.fuel.burn()
        return next(self._ids)

    def dag(self) -> CostDag:
        threads = {name: ThreadEntry(t.prio, tuple(t.vertices)) for name, t in self.threads.items()}
        return CostDag(threads, frozenset(self.spawn_edges), frozenset(self.join_edges), self.store)

    # ------------------------- expressions -------------------------

    def expr(self, e: T.Expr) -> ExprCost:
        frames: List[T.Let] = []
        vertices: List[int] = []
        while True:
            if T.is_value(e):
                if not frames:
                    return ExprCost(e, tuple(vertices))
                frame = frames.pop()
                vertices.append(self.vertex())
                e = subst_expr(e, frame.var, frame.body)
                continue
            if isinstance(e, T.Let) and not T.is_value(e.bound):
                frames.append(e)
                e = e.bound
                continue
            e = contract(e, self.io)
            vertices.append(self.vertex())

    # ------------------------- commands -------------------------

    def cmd(self, thread: str, prio: T.Priority, m: T.Cmd, sig: Dict[str, SigEntry]) -> T.Expr:
        """Cost m in thread, appending to its vertex sequence; sig is updated in place."""
        if not isinstance(prio, T.PConst):
            raise Stuck(f"thread {thread} runs at a priority variable {prio.name}")
        current = self.threads.setdefault(thread, _Thread(prio.name))
        pending: List[T.Bind] = []
        while True:
            if isinstance(m, T.Bind):
                cost = self.expr(m.expr)
                current.vertices.extend(cost.vertices)
                if not isinstance(cost.value, T.CmdV):
                    raise Stuck(f"bind of a non-command value {show_expr(cost.value)}")
                pending.append(m)
                m = cost.value.cmd
                continue
            if isinstance(m, T.Spawn):
                value = self.spawn(thread, m, sig)
            elif isinstance(m, T.Sync):
                value = self.sync(thread, m, sig)
            elif isinstance(m, T.Ret):
                cost = self.expr(m.expr)
                current.vertices.extend(cost.vertices)
                value = cost.value
            else:
                raise Stuck(f"not a command: {m!r}")
            if not pending:
                return value
            frame = pending.pop()
            current.vertices.append(self.vertex())
            m = subst_expr(value, frame.var, frame.rest)

    def spawn(self, parent: str, m: T.Spawn, sig: Dict[str, SigEntry]) -> T.Expr:
        child = self.names.fresh()
        child_sig = dict(sig)
        value = self.thread(child, m.prio, m.body, child_sig)
        spawned = {k: v for k, v in child_sig.items() if k not in sig}
        self.record[child] = RecordEntry(value, spawned)
        u = self.vertex()
        self.threads[parent].vertices.append(u)
        self.spawn_edges.add((u, child))
        sig[child] = self.declared[child] = SigEntry(m.ty, m.prio)
        return T.Tid(child)

    def sync(self, thread: str, m: T.Sync, sig: Dict[str, SigEntry]) -> T.Expr:
        cost = self.expr(m.expr)
        current = self.threads[thread]
        current.vertices.extend(cost.vertices)
        if not isinstance(cost.value, T.Tid):
            raise Stuck(f"sync on a non-thread value {show_expr(cost.value)}")
        target = cost.value.name
        entry = self.record.get(target)
        if entry is None:
            raise UnknownThread(f"sync on {target}, which has no recorded result")
        u = self.vertex()
        current.vertices.append(u)
        self.join_edges.add((target, u))
        sig.update(entry.spawned)
        return entry.value

    def thread(self, name: str, prio: T.Priority, m: T.Cmd, sig: Dict[str, SigEntry]) -> T.Expr:
        """A whole thread: its command followed by the terminal return vertex."""
        value = self.cmd(name, prio, m, sig)
        self.threads[name].vertices.append(self.vertex())
        logger.debug(f"Costed thread {name}: {len(self.threads[name].vertices)} vertices")
        return value


# ------------------------- entry points -------------------------

def cost_expr(e: T.Expr, store: Optional[PriorityOrder] = None, inputs: Iterable[int] = (),
              fuel: Optional[int] = None) -> ExprCost:
    builder = CostBuilder(store or PriorityOrder(), IOPort.of(inputs), fuel)
    return builder.expr(e)


def cost_cmd(store: PriorityOrder, record: ThreadRecord, sig: Dict[str, SigEntry], thread: str,
             prio: T.Priority, m: T.Cmd, inputs: Iterable[int] = (), fuel: Optional[int] = None,
             names: Optional[ThreadNames] = None) -> CmdCost:
    """Cost m at thread without its terminal vertex; record and sig are not mutated."""
    builder = CostBuilder(store, IOPort.of(inputs), fuel, names)
    builder.record = dict(record)
    sig_out = dict(sig)
    value = builder.cmd(thread, prio, m, sig_out)
    return CmdCost(value, builder.dag(), builder.record, sig_out)


def cost_thread(store: PriorityOrder, name: str, prio: T.Priority, m: T.Cmd,
                inputs: Iterable[int] = (), fuel: Optional[int] = None) -> CmdCost:
    builder = CostBuilder(store, IOPort.of(inputs), fuel)
    sig: Dict[str, SigEntry] = {}
    value = builder.thread(name, prio, m, sig)
    return CmdCost(value, builder.dag(), builder.record, sig)


def cost_program(store: PriorityOrder, m: T.Cmd, inputs: Iterable[int] = (),
                 fuel: Optional[int] = None) -> ProgramCost:
    """Cost a program typed at bot as the root thread `main`."""
    builder = CostBuilder(store, IOPort.of(inputs), fuel)
    sig: Dict[str, SigEntry] = {}
    value = builder.thread(ThreadNames.ROOT, T.BOT, m, sig)
    dag = builder.dag()
    logger.info(f"Cost DAG: {len(dag.threads)} threads, {dag.size()} vertices")
    full_sig = {ThreadNames.ROOT: SigEntry(T.UNIT, T.BOT), **builder.declared}
    return ProgramCost(value, dag, builder.record, full_sig, list(builder.io.outputs))


def audit_record(store: PriorityOrder, sig: Dict[str, SigEntry], record: ThreadRecord) -> List[str]:
    """Every recorded value must have its thread's declared type under the whole signature."""
    report: List[str] = []
    for name, entry in record.items():
        declared = sig.get(name)
        if declared is None:
            raise AuditFailure(f"recorded thread {name} is not in the signature")
        if not T.value_check(entry.value, sig):
            raise AuditFailure(f"record of {name} holds a non-value {show_expr(entry.value)}")
        try:
            found = type_expr(store, sig, EMPTY_CONTEXT, entry.value)
        except PrimlError as e:
            raise AuditFailure(f"record of {name} does not type: {e}") from e
        if not alpha_equal(found, declared.ty):
            raise AuditFailure(f"record of {name} has type {show_type(found)}, declared {show_type(declared.ty)}")
        report.append(f"{name}: {show_type(declared.ty)} ok")
    return report
