"""Thread pools: running threads, the global signature and retained results."""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from src.core import terms as T
from src.core.errors import DuplicateThread, UnknownThread
from src.core.names import ThreadNames
from src.core.actions import Action, RetOf
from src.runtime.stepper import IOPort, Spawned, is_finished, step_cmd, sync_target
from src.statics.typechecker import SigEntry

logger = logging.getLogger(__name__)


@dataclass
class ThreadPool:
    """
    The pool in normal form: one global signature for every thread ever
    spawned, the commands of running threads and the values of finished ones.
    """
    threads: Dict[str, Tuple[T.Priority, T.Cmd]] = field(default_factory=dict)
    sig: Dict[str, SigEntry] = field(default_factory=dict)
    retained: Dict[str, T.Expr] = field(default_factory=dict)

    def add(self, name: str, prio: T.Priority, cmd: T.Cmd, ty: T.Type) -> None:
        if name in self.sig:
            raise DuplicateThread(f"thread {name} already exists")
        self.sig[name] = SigEntry(ty, prio)
        self.threads[name] = (prio, cmd)

    def prio_of(self, name: str) -> T.Priority:
        try:
            return self.sig[name].prio
        except KeyError:
            raise UnknownThread(f"unknown thread {name}") from None

    def is_done(self, name: str) -> bool:
        return name in self.retained

    def waiting_on(self, name: str) -> Optional[str]:
        """The unfinished thread that name's next step would sync with, if any."""
        prio_cmd = self.threads.get(name)
        if prio_cmd is None:
            return None
        target = sync_target(prio_cmd[1])
        if target is not None and target not in self.retained:
            return target
        return None

    def step(self, name: str, io: IOPort, names: ThreadNames) -> Tuple[Action, Tuple[Spawned, ...]]:
        """
        Step thread name once. A thread whose command is `ret v` retires: its
        value is retained and the step's action is its return.
        """
        if name not in self.threads:
            raise UnknownThread(f"thread {name} is not running")
        prio, cmd = self.threads[name]
        if is_finished(cmd):
            del self.threads[name]
            self.retained[name] = cmd.expr
            logger.debug(f"Thread {name} returned")
            return RetOf(name, cmd.expr), ()
        result = step_cmd(self.sig, cmd, io, self.retained, names)
        self.threads[name] = (prio, result.cmd)
        for child in result.spawned:
            self.add(child.name, child.prio, child.cmd, child.ty)
        return result.action, result.spawned
