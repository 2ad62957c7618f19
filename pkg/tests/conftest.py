import pathlib
import sys

import pytest

from src.core.priorities import PriorityOrder, order_from
from src.cost import CostDag, seq_compose
from src.prelude import load_prelude
from src.statics import check_program, elaborate
from src.syntax import parse_program

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"

sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))


def corpus_path(name: str) -> pathlib.Path:
    return CORPUS / f"{name}.priml"


def compile_source(text: str, source: str = "<input>", prelude: bool = True):
    """Parse, elaborate and type check text; returns (elaboration result, type)."""
    program = parse_program(text, source)
    result = elaborate(program, PriorityOrder(), load_prelude() if prelude else None)
    return result, check_program(result.store, result.cmd)


def compile_corpus(name: str, prelude: bool = True):
    path = corpus_path(name)
    return compile_source(path.read_text(encoding="utf-8"), str(path), prelude)


@pytest.fixture
def corpus():
    return corpus_path


@pytest.fixture
def diamond() -> PriorityOrder:
    """bot < low < {left, right} < high"""
    return order_from(
        ["low", "left", "right", "high"],
        [("low", "left"), ("low", "right"), ("left", "high"), ("right", "high")],
    )


@pytest.fixture
def two_level() -> PriorityOrder:
    return order_from(["lo", "hi"], [("lo", "hi")])


# main (lo) spawns a (hi) at its first vertex and joins it at its last
SPAWN_JOIN = """\
prio lo
prio hi
ord lo hi
thread main lo 3
thread a hi 2
spawn main:0 a
join a main:2
"""


def spawn_compose(u: int, a: str, prio: str, g: CostDag) -> CostDag:
    """Vertex u on thread a, then g; u spawns every thread whose first vertex has no predecessor in g."""
    head = CostDag.single(g.store, a, prio, u)
    joined_into = {v for _, v in g.join_edges}
    spawned = {child for _, child in g.spawn_edges}
    roots = [b for b, e in g.threads.items()
             if b != a and e.vertices and b not in spawned and e.vertices[0] not in joined_into]
    out = seq_compose(head, a, g)
    return CostDag(out.threads, out.spawn_edges | {(u, b) for b in roots}, out.join_edges, out.store)
