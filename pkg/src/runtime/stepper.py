"""
Single-step transitions for closed expressions and for the command of one thread.

Both steppers locate the redex by walking down evaluation frames in a loop
and then rebuild the surrounding term, so deep let-nesting does not recurse.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from src.core import terms as T
from src.core.errors import Blocked, Stuck
from src.core.names import ThreadNames
from src.core.pretty import show_expr
from src.core.subst import subst_expr, subst_prio
from src.core.actions import SILENT, Action, SyncFrom

logger = logging.getLogger(__name__)


# ------------------------- input and output -------------------------

@dataclass
class IOPort:
    """The input queue consumed by `input` and the log written by `output`."""
    inputs: Deque[int] = field(default_factory=deque)
    outputs: List[int] = field(default_factory=list)
    sink: Optional[Callable[[int], None]] = None

    @classmethod
    def of(cls, inputs: Iterable[int] = (), sink: Optional[Callable[[int], None]] = None) -> "IOPort":
        return cls(deque(inputs), [], sink)

    def read(self) -> int:
        if not self.inputs:
            logger.warning("input exhausted; reading 0")
            return 0
        return self.inputs.popleft()

    def write(self, n: int) -> None:
        self.outputs.append(n)
        if self.sink is not None:
            self.sink(n)


# ------------------------- expressions -------------------------

def contract(e: T.Expr, io: IOPort) -> T.Expr:
    """Contract a redex whose operands are already values."""
    if isinstance(e, T.Let):
        return subst_expr(e.bound, e.var, e.body)
    if isinstance(e, T.Ifz) and isinstance(e.value, T.Num):
        if e.value.value == 0:
            return e.if_zero
        return subst_expr(T.Num(e.value.value - 1), e.var, e.if_succ)
    if isinstance(e, T.App) and isinstance(e.fn, T.Lam):
        return subst_expr(e.arg, e.fn.var, e.fn.body)
    if isinstance(e, T.MkPair):
        return T.PairV(e.left, e.right)
    if isinstance(e, T.Fst) and isinstance(e.value, T.PairV):
        return e.value.left
    if isinstance(e, T.Snd) and isinstance(e.value, T.PairV):
        return e.value.right
    if isinstance(e, T.MkInl):
        return T.InlV(e.value, e.ty)
    if isinstance(e, T.MkInr):
        return T.InrV(e.value, e.ty)
    if isinstance(e, T.Case):
        if isinstance(e.value, T.InlV):
            return subst_expr(e.value.value, e.left_var, e.left)
        if isinstance(e.value, T.InrV):
            return subst_expr(e.value.value, e.right_var, e.right)
    if isinstance(e, T.Output) and isinstance(e.value, T.Num):
        io.write(e.value.value)
        return T.UnitV()
    if isinstance(e, T.Input):
        return T.Num(io.read())
    if isinstance(e, T.PrApp) and isinstance(e.value, T.PLam):
        return subst_prio(e.prio, e.value.var, e.value.body)
    if isinstance(e, T.Fix):
        return subst_expr(e, e.var, e.body)
    if isinstance(e, T.Succ) and isinstance(e.value, T.Num):
        return T.Num(e.value.value + 1)
    raise Stuck(f"no transition applies to {show_expr(e)}")


def step_expr(sig, e: T.Expr, io: Optional[IOPort] = None) -> T.Expr:
    """One transition of a closed, non-value expression."""
    io = io if io is not None else IOPort()
    if T.is_value(e):
        raise Stuck(f"{show_expr(e)} is already a value")
    frames: List[T.Let] = []
    while isinstance(e, T.Let) and not T.is_value(e.bound):
        frames.append(e)
        e = e.bound
    result = contract(e, io)
    for frame in reversed(frames):
        result = T.Let(frame.var, result, frame.body)
    return result


# ------------------------- commands -------------------------

class Spawned(NamedTuple):
    name: str
    prio: T.Priority
    cmd: T.Cmd
    ty: T.Type


class CmdStep(NamedTuple):
    action: Action
    cmd: T.Cmd
    spawned: Tuple[Spawned, ...]


def _cmd_redex(m: T.Cmd, io: IOPort, retained: Mapping[str, T.Expr],
               names: ThreadNames, sig) -> CmdStep:
    if isinstance(m, T.Bind):
        if not T.is_value(m.expr):
            return CmdStep(SILENT, T.Bind(step_expr(sig, m.expr, io), m.var, m.rest), ())
        if not isinstance(m.expr, T.CmdV):
            raise Stuck(f"bind of a non-command value {show_expr(m.expr)}")
        inner = m.expr.cmd
        if isinstance(inner, T.Ret) and T.is_value(inner.expr):
            return CmdStep(SILENT, subst_expr(inner.expr, m.var, m.rest), ())
        raise AssertionError("unreachable: handled by the frame walk")
    if isinstance(m, T.Spawn):
        child = names.fresh()
        return CmdStep(SILENT, T.Ret(T.Tid(child)), (Spawned(child, m.prio, m.body, m.ty),))
    if isinstance(m, T.Sync):
        if not T.is_value(m.expr):
            return CmdStep(SILENT, T.Sync(step_expr(sig, m.expr, io)), ())
        if not isinstance(m.expr, T.Tid):
            raise Stuck(f"sync on a non-thread value {show_expr(m.expr)}")
        target = m.expr.name
        if target not in retained:
            raise Blocked(target)
        value = retained[target]
        return CmdStep(SyncFrom(target, value), T.Ret(value), ())
    if isinstance(m, T.Ret):
        if T.is_value(m.expr):
            raise Stuck("a returned command has no further command step")
        return CmdStep(SILENT, T.Ret(step_expr(sig, m.expr, io)), ())
    raise Stuck(f"not a command: {m!r}")


def _descends(m: T.Cmd) -> bool:
    """Bind of an encapsulated command that still has work to do inside."""
    if not (isinstance(m, T.Bind) and isinstance(m.expr, T.CmdV)):
        return False
    inner = m.expr.cmd
    return not (isinstance(inner, T.Ret) and T.is_value(inner.expr))


def step_cmd(sig, m: T.Cmd, io: Optional[IOPort] = None, retained: Mapping[str, T.Expr] = None,
             names: Optional[ThreadNames] = None) -> CmdStep:
    """
    One command transition: (action, next command, spawned threads).
    Raises Blocked when a sync targets a thread without a retained result.
    """
    io = io if io is not None else IOPort()
    retained = retained if retained is not None else {}
    names = names if names is not None else ThreadNames()
    frames: List[T.Bind] = []
    while _descends(m):
        frames.append(m)
        m = m.expr.cmd
    result = _cmd_redex(m, io, retained, names, sig)
    cmd = result.cmd
    for frame in reversed(frames):
        cmd = T.Bind(T.CmdV(frame.expr.prio, cmd), frame.var, frame.rest)
    return CmdStep(result.action, cmd, result.spawned)


def sync_target(m: T.Cmd) -> Optional[str]:
    """The thread named by m's redex when that redex is a sync on a thread id."""
    while _descends(m):
        m = m.expr.cmd
    if isinstance(m, T.Sync) and isinstance(m.expr, T.Tid):
        return m.expr.name
    return None


def is_finished(m: T.Cmd) -> bool:
    return isinstance(m, T.Ret) and T.is_value(m.expr)
