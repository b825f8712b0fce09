"""Bottom-up and top-down subterm sets.

Top-down subterms treat recursion by unfolding: the subterms of a binder
are the binder itself plus the subterms of its one-step unfolding.  On
contractive input the set is finite because repeated unfoldings are
recognised as already-interned values.
"""

from __future__ import annotations

from typing import FrozenSet

from . import syntax
from .syntax import (
    Branch, BoundVar, End, Input, Output, Rec, Select, TypeExpr, Var,
    render, subst_top,
)

__all__ = ["sub_bottom_up", "sub_top_down", "sub_pair", "canonical_order"]


def sub_bottom_up(t: TypeExpr) -> FrozenSet[TypeExpr]:
    """Purely structural subterm set; the binder case substitutes the
    binder into each subterm of its body."""
    acc = set()
    _bu(t, acc)
    return frozenset(acc)


def _bu(t: TypeExpr, acc: set) -> None:
    if isinstance(t, (End, Var, BoundVar)):
        acc.add(t)
    elif isinstance(t, Rec):
        acc.add(t)
        inner: set = set()
        _bu(t.body, inner)
        for s in inner:
            acc.add(subst_top(s, t))
    elif isinstance(t, (Input, Output)):
        acc.add(t)
        _bu(t.cont, acc)
        for p in t.payloads:
            _bu(p, acc)
    else:
        acc.add(t)
        for _, b in t.branches:
            _bu(b, acc)


def sub_top_down(t: TypeExpr) -> FrozenSet[TypeExpr]:
    """Least set containing *t* and closed under the unfolding-style
    subterm equations."""
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        if isinstance(u, Rec):
            stack.append(subst_top(u.body, u))
        elif isinstance(u, (Input, Output)):
            stack.append(u.cont)
            stack.extend(u.payloads)
        elif isinstance(u, (Select, Branch)):
            stack.extend(b for _, b in u.branches)
    return frozenset(seen)


def sub_pair(t: TypeExpr, u: TypeExpr) -> FrozenSet[TypeExpr]:
    return sub_top_down(t) | sub_top_down(u)


def canonical_order(types) -> list:
    """Stable listing order: lexicographic on the rendered text."""
    return sorted(types, key=render)
