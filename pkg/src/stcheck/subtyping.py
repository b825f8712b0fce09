"""Four decision procedures for session subtyping.

All four decide the same relation:

* ``inductive``  -- recursive judgement search with a per-path assumption
  context; sibling premises do not share contexts (worst-case exponential).
* ``memoized``   -- the same search with one assumption set threaded
  through all premises in sequence; the first failing premise aborts.
* ``product``    -- lazy reachability on the pair graph of the two type
  LTSs: the left type is a subtype iff no inconsistent pair is reachable
  from the root pair (quadratic).
* ``allpairs``   -- the full pair grid with a backward sweep from the
  inconsistent pairs; yields verdicts for every pair of subterms at once.

Pair moves follow a four-way simulation discipline: termination, payload
and continuation moves of the left side must be matched by the right,
branching follows the left side's labels, selection follows the right
side's labels, and output payloads swap the pair (contravariance).
"""

from __future__ import annotations

import sys
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Set, Tuple

from .errors import OpenTypeError, StcheckError
from .lts import (
    A_BRA, A_END, A_IN_CONT, A_IN_PAYLOAD, A_OUT_CONT, A_OUT_PAYLOAD, A_SEL,
    SKIP, Action, Node, action_name, transitions,
)
from .subterms import sub_pair
from .syntax import (
    Branch, End, Input, Output, Select, TypeExpr, is_closed, render, unfold,
)

__all__ = [
    "ProductNode", "SubtypeReport", "DeadlineExceeded", "ALGORITHMS",
    "is_inconsistent", "product_successors",
    "subtype_product", "subtype_all_pairs", "subtype_allpairs_report",
    "subtype_inductive", "subtype_memoized",
    "check", "is_subtype", "equal_coinductive", "export_product_dot",
]

# Action kinds the left node enables that the right must match, and vice
# versa.  Output payloads appear on both sides (equal arity) and flip the
# successor pair; selection follows the right, branching the left.
_LEFT_MUST_MATCH = frozenset(
    {A_END, A_IN_CONT, A_OUT_CONT, A_IN_PAYLOAD, A_BRA, A_OUT_PAYLOAD})
_RIGHT_MUST_MATCH = frozenset({A_END, A_IN_PAYLOAD, A_SEL, A_OUT_PAYLOAD})

COUNTER_KEYS = ("judgements_visited", "memo_entries", "product_nodes",
                "product_edges", "max_context_depth")

ALGORITHMS = ("inductive", "memoized", "product", "allpairs")


class DeadlineExceeded(StcheckError):
    """Raised internally when a cooperative deadline passes."""


class ProductNode(NamedTuple):
    left: Node
    right: Node


@dataclass
class SubtypeReport:
    verdict: bool
    algorithm: str
    counters: Dict[str, int]
    elapsed: float  # seconds

    def __post_init__(self):
        for key in COUNTER_KEYS:
            self.counters.setdefault(key, 0)


def _require_closed(t: TypeExpr, u: TypeExpr) -> None:
    for side in (t, u):
        if side is not SKIP and not is_closed(side):
            raise OpenTypeError(f"type has free variables: {render(side)}")


def _head_class(t: Node) -> int:
    """Constructor class of the unfolded head, read off the enabled action
    kinds (the terminal gets its own class)."""
    trans = transitions(t)
    if not trans:
        return -1  # SKIP
    return min(a.kind for a in trans)


def is_inconsistent(p: ProductNode) -> bool:
    """A pair is inconsistent when the two unfolded heads are different
    constructors, or one side enables a move the other side is required to
    match but cannot.

    The head-constructor test is not implied by the direction sets alone:
    a selection on the left facing a branching on the right enables no
    required action on either side, yet the subtyping clauses relate
    selections only to selections.
    """
    lt = transitions(p.left)
    rt = transitions(p.right)
    if _head_class(p.left) != _head_class(p.right):
        return True
    for a in lt:
        if a.kind in _LEFT_MUST_MATCH and a not in rt:
            return True
    for a in rt:
        if a.kind in _RIGHT_MUST_MATCH and a not in lt:
            return True
    return False


def product_successors(p: ProductNode) -> List[Tuple[Action, ProductNode]]:
    """Matched moves of a pair, in the fixed action order; output-payload
    moves yield the swapped pair."""
    lt = transitions(p.left)
    rt = transitions(p.right)
    result = []
    for a in sorted(lt.keys() & rt.keys()):
        if a.kind == A_OUT_PAYLOAD:
            result.append((a, ProductNode(rt[a], lt[a])))
        else:
            result.append((a, ProductNode(lt[a], rt[a])))
    return result


def subtype_product(t: TypeExpr, u: TypeExpr,
                    deadline: Optional[float] = None) -> SubtypeReport:
    """Lazy breadth-first search of the reachable pair graph; refutes as
    soon as an inconsistent pair is dequeued."""
    _require_closed(t, u)
    start = time.perf_counter()
    root = ProductNode(t, u)
    seen = {root}
    queue = deque((root,))
    edges = 0
    verdict = True
    while queue:
        if deadline is not None and time.perf_counter() > deadline:
            raise DeadlineExceeded
        p = queue.popleft()
        if is_inconsistent(p):
            verdict = False
            break
        for _, q in product_successors(p):
            edges += 1
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return SubtypeReport(
        verdict=verdict,
        algorithm="product",
        counters={"product_nodes": len(seen), "product_edges": edges},
        elapsed=time.perf_counter() - start,
    )


def _grid(t: TypeExpr, u: TypeExpr):
    """All pairs over the joint subterm universe, their inconsistency flags
    and the reversed matched-move adjacency."""
    universe = list(sub_pair(t, u)) + [SKIP]
    heads = {v: _head_class(v) for v in universe}
    keys = {v: frozenset(transitions(v)) for v in universe}
    left_req = {v: frozenset(a for a in keys[v] if a.kind in _LEFT_MUST_MATCH)
                for v in universe}
    right_req = {v: frozenset(a for a in keys[v] if a.kind in _RIGHT_MUST_MATCH)
                 for v in universe}
    trans = {v: transitions(v) for v in universe}

    bad: List[ProductNode] = []
    reverse: Dict[ProductNode, List[ProductNode]] = {}
    edges = 0
    for lv in universe:
        lkeys = keys[lv]
        ltrans = trans[lv]
        lreq = left_req[lv]
        lhead = heads[lv]
        for rv in universe:
            node = ProductNode(lv, rv)
            if lhead != heads[rv] or not (lreq <= keys[rv]) \
                    or not (right_req[rv] <= lkeys):
                bad.append(node)
                continue
            rtrans = trans[rv]
            for a in lkeys & keys[rv]:
                if a.kind == A_OUT_PAYLOAD:
                    succ = ProductNode(rtrans[a], ltrans[a])
                else:
                    succ = ProductNode(ltrans[a], rtrans[a])
                reverse.setdefault(succ, []).append(node)
                edges += 1
    total = len(universe) * len(universe)
    return universe, bad, reverse, total, edges


def subtype_all_pairs(t: TypeExpr, u: TypeExpr) -> FrozenSet[ProductNode]:
    """Exactly the pairs (T', U') over the joint subterm universe (plus
    the terminal) with T' a subtype of U': the complement of the backward
    closure of the inconsistent pairs."""
    _require_closed(t, u)
    universe, bad, reverse, _, _ = _grid(t, u)
    doomed: Set[ProductNode] = set(bad)
    stack = list(bad)
    while stack:
        node = stack.pop()
        for pred in reverse.get(node, ()):
            if pred not in doomed:
                doomed.add(pred)
                stack.append(pred)
    return frozenset(
        ProductNode(lv, rv)
        for lv in universe for rv in universe
        if ProductNode(lv, rv) not in doomed)


def subtype_allpairs_report(t: TypeExpr, u: TypeExpr,
                            deadline: Optional[float] = None) -> SubtypeReport:
    """Verdict for the root pair via the all-pairs backward sweep."""
    _require_closed(t, u)
    start = time.perf_counter()
    universe, bad, reverse, total, edges = _grid(t, u)
    if deadline is not None and time.perf_counter() > deadline:
        raise DeadlineExceeded
    doomed: Set[ProductNode] = set(bad)
    stack = list(bad)
    while stack:
        node = stack.pop()
        for pred in reverse.get(node, ()):
            if pred not in doomed:
                doomed.add(pred)
                stack.append(pred)
    verdict = ProductNode(t, u) not in doomed
    return SubtypeReport(
        verdict=verdict,
        algorithm="allpairs",
        counters={"product_nodes": total, "product_edges": edges},
        elapsed=time.perf_counter() - start,
    )


def _split(t: TypeExpr, u: TypeExpr):
    """Unfold both sides and classify the head pair.  Returns the premise
    list as (left, right) pairs, or None on a shape clash."""
    a = unfold(t)
    b = unfold(u)
    if isinstance(a, End):
        return [] if isinstance(b, End) else None
    if isinstance(a, Input):
        if not isinstance(b, Input) or len(a.payloads) != len(b.payloads):
            return None
        prems = list(zip(a.payloads, b.payloads))
        prems.append((a.cont, b.cont))
        return prems
    if isinstance(a, Output):
        if not isinstance(b, Output) or len(a.payloads) != len(b.payloads):
            return None
        prems = [(q, p) for p, q in zip(a.payloads, b.payloads)]
        prems.append((a.cont, b.cont))
        return prems
    if isinstance(a, Branch):
        if not isinstance(b, Branch):
            return None
        rights = dict(b.branches)
        prems = []
        for l, ta in a.branches:  # left's labels must all exist on the right
            tb = rights.get(l)
            if tb is None:
                return None
            prems.append((ta, tb))
        return prems
    if isinstance(a, Select):
        if not isinstance(b, Select):
            return None
        lefts = dict(a.branches)
        prems = []
        for l, tb in b.branches:  # right's labels must all exist on the left
            ta = lefts.get(l)
            if ta is None:
                return None
            prems.append((ta, tb))
        return prems
    return None


def subtype_inductive(t: TypeExpr, u: TypeExpr,
                      deadline: Optional[float] = None) -> SubtypeReport:
    """Judgement search with path-local assumption contexts.

    A pair already assumed on the current path succeeds immediately; each
    premise restarts from the same extended context, so work done in one
    sibling is never reused in the next.
    """
    _require_closed(t, u)
    start = time.perf_counter()
    ctx: Set[Tuple[TypeExpr, TypeExpr]] = set()
    visited = 0
    max_depth = 0

    def go(a: TypeExpr, b: TypeExpr) -> bool:
        nonlocal visited, max_depth
        visited += 1
        if deadline is not None and time.perf_counter() > deadline:
            raise DeadlineExceeded
        pair = (a, b)
        if pair in ctx:
            return True
        ctx.add(pair)
        if len(ctx) > max_depth:
            max_depth = len(ctx)
        try:
            prems = _split(a, b)
            if prems is None:
                return False
            return all(go(pa, pb) for pa, pb in prems)
        finally:
            ctx.discard(pair)

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 200_000))
    try:
        verdict = go(t, u)
    finally:
        sys.setrecursionlimit(limit)
    return SubtypeReport(
        verdict=verdict,
        algorithm="inductive",
        counters={"judgements_visited": visited,
                  "max_context_depth": max_depth},
        elapsed=time.perf_counter() - start,
    )


def subtype_memoized(t: TypeExpr, u: TypeExpr,
                     deadline: Optional[float] = None) -> SubtypeReport:
    """The same search with a single assumption set threaded through all
    premises; any failing premise aborts the whole run (no negative
    caching, assumptions are never retracted)."""
    _require_closed(t, u)
    start = time.perf_counter()
    seen: Set[Tuple[TypeExpr, TypeExpr]] = set()
    visited = 0

    def go(a: TypeExpr, b: TypeExpr) -> bool:
        nonlocal visited
        visited += 1
        if deadline is not None and time.perf_counter() > deadline:
            raise DeadlineExceeded
        pair = (a, b)
        if pair in seen:
            return True
        seen.add(pair)
        prems = _split(a, b)
        if prems is None:
            return False
        return all(go(pa, pb) for pa, pb in prems)

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 200_000))
    try:
        verdict = go(t, u)
    finally:
        sys.setrecursionlimit(limit)
    return SubtypeReport(
        verdict=verdict,
        algorithm="memoized",
        counters={"memo_entries": len(seen), "judgements_visited": visited},
        elapsed=time.perf_counter() - start,
    )


_DISPATCH = {
    "inductive": subtype_inductive,
    "memoized": subtype_memoized,
    "product": subtype_product,
    "allpairs": subtype_allpairs_report,
}


def check(t: TypeExpr, u: TypeExpr, algorithm: str = "product",
          deadline: Optional[float] = None) -> SubtypeReport:
    try:
        impl = _DISPATCH[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm: {algorithm!r}") from None
    return impl(t, u, deadline=deadline)


def is_subtype(t: TypeExpr, u: TypeExpr) -> bool:
    return subtype_product(t, u).verdict


def equal_coinductive(t: TypeExpr, u: TypeExpr) -> bool:
    return subtype_product(t, u).verdict and subtype_product(u, t).verdict


def _pair_label(p: ProductNode) -> str:
    left = "Skip" if p.left is SKIP else render(p.left)
    right = "Skip" if p.right is SKIP else render(p.right)
    return f"({left}, {right})"


def export_product_dot(t: TypeExpr, u: TypeExpr) -> str:
    """DOT digraph of the reachable pair graph; inconsistent pairs are
    filled red and not expanded further."""
    _require_closed(t, u)
    root = ProductNode(t, u)
    adjacency: Dict[ProductNode, List[Tuple[Action, ProductNode]]] = {}
    bad: Set[ProductNode] = set()
    queue = deque((root,))
    seen = {root}
    while queue:
        p = queue.popleft()
        if is_inconsistent(p):
            bad.add(p)
            adjacency[p] = []
            continue
        succs = product_successors(p)
        adjacency[p] = succs
        for _, q in succs:
            if q not in seen:
                seen.add(q)
                queue.append(q)
    nodes = sorted(seen, key=_pair_label)
    index = {p: i for i, p in enumerate(nodes)}
    lines = ["digraph product {"]
    for p in nodes:
        label = _pair_label(p).replace('"', '\\"')
        style = ', style=filled, fillcolor="#ffbbbb"' if p in bad else ""
        shape = "doubleoctagon" if p == root else "box"
        lines.append(f'  n{index[p]} [label="{label}", shape={shape}{style}];')
    for p in nodes:
        for a, q in adjacency.get(p, ()):
            lines.append(
                f'  n{index[p]} -> n{index[q]} [label="{action_name(a)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
