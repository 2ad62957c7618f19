"""
Generic traversals over core terms: free variables, capture-avoiding
substitution (for value variables and priority variables) and alpha-equivalence.

The traversals are driven by each node's BINDS table, so adding a node class
only means declaring which of its fields bind what.
"""
from __future__ import annotations

import dataclasses
from typing import Dict, FrozenSet, Tuple

from src.core.names import fresh_name
from src.core.terms import PRIO, VAL, PVar, Term, Var, field_names

_EMPTY: FrozenSet[str] = frozenset()
_KIND_INDEX = {VAL: 0, PRIO: 1}

FreeSets = Tuple[FrozenSet[str], FrozenSet[str]]


# ------------------------- free variables -------------------------

def _free(node) -> FreeSets:
    if isinstance(node, Term):
        cached = node.__dict__.get("_fv")
        if cached is None:
            cached = _compute_free(node)
            object.__setattr__(node, "_fv", cached)
        return cached
    if isinstance(node, tuple):
        vals, prios = set(), set()
        for item in node:
            v, p = _free(item)
            vals |= v
            prios |= p
        return frozenset(vals), frozenset(prios)
    return _EMPTY, _EMPTY


def _compute_free(node: Term) -> FreeSets:
    if isinstance(node, Var):
        return frozenset({node.name}), _EMPTY
    if isinstance(node, PVar):
        return _EMPTY, frozenset({node.name})
    vals, prios = set(), set()
    for name in field_names(type(node)):
        v, p = _free(getattr(node, name))
        bind = node.BINDS.get(name)
        if bind is not None:
            kind, binder_field = bind
            bound = getattr(node, binder_field)
            if kind == VAL:
                v = v - {bound}
            else:
                p = p - {bound}
        vals |= v
        prios |= p
    return frozenset(vals), frozenset(prios)


def free_vars(term, kind: str = VAL) -> FrozenSet[str]:
    """Free value variables (kind=VAL) or free priority variables (kind=PRIO)."""
    return _free(term)[_KIND_INDEX[kind]]


# ------------------------- substitution -------------------------

def _binder_fields(cls: type) -> FrozenSet[str]:
    return frozenset(field for _, field in cls.BINDS.values())


def _subst(node, kind: str, name: str, repl: Term, repl_free: FreeSets):
    if isinstance(node, tuple):
        return tuple(_subst(item, kind, name, repl, repl_free) for item in node)
    if not isinstance(node, Term):
        return node
    if kind == VAL and isinstance(node, Var):
        return repl if node.name == name else node
    if kind == PRIO and isinstance(node, PVar):
        return repl if node.name == name else node
    if name not in _free(node)[_KIND_INDEX[kind]]:
        return node

    cls = type(node)
    binders = _binder_fields(cls)
    renamed: Dict[str, str] = {}
    changes = {}
    for field in field_names(cls):
        if field in binders:
            continue
        value = getattr(node, field)
        bind = node.BINDS.get(field)
        if bind is not None:
            bkind, binder_field = bind
            bound = getattr(node, binder_field)
            if bkind == kind and bound == name:
                continue  # shadowed
            if bound in repl_free[_KIND_INDEX[bkind]]:
                fresh = renamed.get(binder_field)
                if fresh is None:
                    avoid = repl_free[_KIND_INDEX[bkind]] | _free(node)[_KIND_INDEX[bkind]] | {name}
                    fresh = fresh_name(bound, avoid | set(renamed.values()))
                    renamed[binder_field] = fresh
                value = rename(value, bkind, bound, fresh)
        changes[field] = _subst(value, kind, name, repl, repl_free)
    changes.update(renamed)
    return dataclasses.replace(node, **changes)


def rename(term, kind: str, old: str, new: str):
    """Replace free occurrences of variable old by new."""
    var = Var(new) if kind == VAL else PVar(new)
    return _subst(term, kind, old, var, _free(var))


def subst_expr(value: Term, var: str, target):
    """[value/var]target for expressions and commands (also used by D-Fix with a fix term)."""
    return _subst(target, VAL, var, value, _free(value))


def subst_prio(prio: Term, var: str, target):
    """[prio/var]target for expressions, commands, types and constraints."""
    return _subst(target, PRIO, var, prio, _free(prio))


# ------------------------- alpha-equivalence -------------------------

def _alpha(x, y, env_x: Dict, env_y: Dict, depth: int) -> bool:
    if isinstance(x, tuple) or isinstance(y, tuple):
        if not (isinstance(x, tuple) and isinstance(y, tuple)) or len(x) != len(y):
            return False
        return all(_alpha(a, b, env_x, env_y, depth) for a, b in zip(x, y))
    if not isinstance(x, Term) or not isinstance(y, Term):
        return x == y
    if type(x) is not type(y):
        return False
    if isinstance(x, (Var, PVar)):
        key = VAL if isinstance(x, Var) else PRIO
        lx = env_x.get((key, x.name))
        ly = env_y.get((key, y.name))
        if lx is None and ly is None:
            return x.name == y.name
        return lx == ly

    cls = type(x)
    binders = _binder_fields(cls)
    for field in field_names(cls):
        if field in binders:
            continue
        bind = x.BINDS.get(field)
        if bind is None:
            if not _alpha(getattr(x, field), getattr(y, field), env_x, env_y, depth):
                return False
            continue
        bkind, binder_field = bind
        inner_x = {**env_x, (bkind, getattr(x, binder_field)): depth}
        inner_y = {**env_y, (bkind, getattr(y, binder_field)): depth}
        if not _alpha(getattr(x, field), getattr(y, field), inner_x, inner_y, depth + 1):
            return False
    return True


def alpha_equal(x, y) -> bool:
    """Structural equality up to renaming of bound value and priority variables."""
    return _alpha(x, y, {}, {}, 0)


def term_size(term) -> int:
    if isinstance(term, tuple):
        return sum(term_size(item) for item in term)
    if not isinstance(term, Term):
        return 0
    return 1 + sum(term_size(getattr(term, f)) for f in field_names(type(term)))
