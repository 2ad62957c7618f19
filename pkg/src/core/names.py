"""Deterministic fresh-name supplies."""
import itertools
from typing import Dict, Iterable, Optional, Set


class NameSupply:
    """
    Hands out names that do not collide with anything seen so far.

    Names are `<base><sep><n>` with a per-supply counter, so two supplies created
    the same way produce the same sequence.
    """

    def __init__(self, sep: str = "'", avoid: Optional[Iterable[str]] = None):
        self.sep = sep
        self._counter = itertools.count(1)
        self._used: Set[str] = set(avoid or ())

    def reserve(self, name: str) -> None:
        self._used.add(name)

    def fresh(self, base: str, avoid: Iterable[str] = ()) -> str:
        base = base.split(self.sep)[0] or "x"
        blocked = set(avoid)
        while True:
            name = f"{base}{self.sep}{next(self._counter)}"
            if name not in self._used and name not in blocked:
                self._used.add(name)
                return name


class ScopedCounter:
    """Per-base-name counters: p -> p_1, p_2, ... (reset per declaration)."""

    def __init__(self, sep: str = "_"):
        self.sep = sep
        self._counts: Dict[str, int] = {}

    def next(self, base: str) -> str:
        k = self._counts.get(base, 0) + 1
        self._counts[base] = k
        return f"{base}{self.sep}{k}"


class ThreadNames:
    """Thread ids `t1, t2, ...` in spawn order; the root thread is `main`."""
    ROOT = "main"

    def __init__(self, prefix: str = "t"):
        self.prefix = prefix
        self._counter = itertools.count(1)

    def fresh(self) -> str:
        return f"{self.prefix}{next(self._counter)}"


def fresh_name(base: str, avoid: Iterable[str], sep: str = "'") -> str:
    """The first `<base><sep><n>` (n = 1, 2, ...) not in avoid; depends only on its arguments."""
    base = base.split(sep)[0] or "x"
    blocked = set(avoid)
    for n in itertools.count(1):
        name = f"{base}{sep}{n}"
        if name not in blocked:
            return name
