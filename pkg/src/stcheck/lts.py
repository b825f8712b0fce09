"""The labelled transition system of a session type.

Nodes are (top-down) subterms plus the distinguished terminal ``SKIP``;
actions mark termination, payloads, continuations and choice labels.
Transitions are computed from the unfolded head, so a type and its
unfolding have identical outgoing edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, NamedTuple, Optional, Tuple, Union

from .errors import OpenTypeError
from .syntax import (
    Branch, End, Input, Output, Select, TypeExpr, is_closed, render, unfold,
)

__all__ = [
    "SKIP", "Skip", "Node",
    "A_END", "A_IN_CONT", "A_OUT_CONT", "A_IN_PAYLOAD", "A_OUT_PAYLOAD",
    "A_BRA", "A_SEL",
    "Action", "act_end", "act_in_cont", "act_out_cont", "in_payload",
    "out_payload", "bra_label", "sel_label", "action_name",
    "transitions", "out_degree", "TypeLts", "build_lts", "lts_to_dot",
]


class Skip:
    """Terminal sink reached by the termination action; not a type."""

    _instance: Optional["Skip"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "SKIP"


SKIP = Skip()

Node = Union[TypeExpr, Skip]

# Action kinds, in the fixed total search order.
A_END = 0
A_IN_CONT = 1
A_OUT_CONT = 2
A_IN_PAYLOAD = 3
A_OUT_PAYLOAD = 4
A_BRA = 5
A_SEL = 6


class Action(NamedTuple):
    """Transition label; ``arg`` is a 1-based payload index or a choice
    label, depending on the kind.  Being a tuple, actions order exactly by
    (kind, arg)."""

    kind: int
    arg: Union[int, str, None] = None


act_end = Action(A_END)
act_in_cont = Action(A_IN_CONT)
act_out_cont = Action(A_OUT_CONT)


def in_payload(i: int) -> Action:
    return Action(A_IN_PAYLOAD, i)


def out_payload(i: int) -> Action:
    return Action(A_OUT_PAYLOAD, i)


def bra_label(label: str) -> Action:
    return Action(A_BRA, label)


def sel_label(label: str) -> Action:
    return Action(A_SEL, label)


def action_name(a: Action) -> str:
    kind, arg = a
    if kind == A_END:
        return "end"
    if kind == A_IN_CONT:
        return "?c"
    if kind == A_OUT_CONT:
        return "!c"
    if kind == A_IN_PAYLOAD:
        return f"?p{arg}"
    if kind == A_OUT_PAYLOAD:
        return f"!p{arg}"
    if kind == A_BRA:
        return f"&{arg}"
    return f"+{arg}"


_transitions_cache: Dict[TypeExpr, Dict[Action, Node]] = {}
_EMPTY: Dict[Action, Node] = {}


def transitions(t: Node) -> Dict[Action, Node]:
    """Outgoing edges of a node as an action-keyed map (deterministic LTS).
    Raises :class:`OpenTypeError` on a type with free variables."""
    if t is SKIP:
        return _EMPTY
    cached = _transitions_cache.get(t)
    if cached is not None:
        return cached
    if not is_closed(t):
        raise OpenTypeError(f"type has free variables: {render(t)}")
    u = unfold(t)
    result: Dict[Action, Node] = {}
    if isinstance(u, End):
        result[act_end] = SKIP
    elif isinstance(u, Input):
        result[act_in_cont] = u.cont
        for i, p in enumerate(u.payloads, 1):
            result[in_payload(i)] = p
    elif isinstance(u, Output):
        result[act_out_cont] = u.cont
        for i, p in enumerate(u.payloads, 1):
            result[out_payload(i)] = p
    elif isinstance(u, Branch):
        for l, b in u.branches:
            result[bra_label(l)] = b
    elif isinstance(u, Select):
        for l, b in u.branches:
            result[sel_label(l)] = b
    else:  # unreachable for closed input
        raise OpenTypeError(f"type has free variables: {render(t)}")
    _transitions_cache[t] = result
    return result


def out_degree(t: TypeExpr) -> int:
    """Out-degree measure of an *unfolded* head; recursion binders and
    variables count 0 because they are not unfolded heads."""
    if isinstance(t, End):
        return 1
    if isinstance(t, (Input, Output)):
        return len(t.payloads) + 1
    if isinstance(t, (Select, Branch)):
        return len(t.branches)
    return 0


@dataclass(frozen=True)
class TypeLts:
    """Reachable part of the LTS from ``root``; immutable after build."""

    root: TypeExpr
    adjacency: Dict[Node, Dict[Action, Node]]

    @property
    def nodes(self) -> frozenset:
        return frozenset(self.adjacency)

    @property
    def num_edges(self) -> int:
        return sum(len(succ) for succ in self.adjacency.values())

    def edges(self) -> Iterator[Tuple[Node, Action, Node]]:
        for src, succ in self.adjacency.items():
            for a, dst in succ.items():
                yield src, a, dst

    def successor(self, node: Node, action: Action) -> Optional[Node]:
        return self.adjacency.get(node, _EMPTY).get(action)


def build_lts(t: TypeExpr) -> TypeLts:
    """Breadth-first reachable closure of :func:`transitions`."""
    adjacency: Dict[Node, Dict[Action, Node]] = {}
    queue = [t]
    while queue:
        node = queue.pop()
        if node in adjacency:
            continue
        succ = transitions(node)
        adjacency[node] = succ
        for dst in succ.values():
            if dst not in adjacency:
                queue.append(dst)
    return TypeLts(root=t, adjacency=adjacency)


def _node_label(node: Node) -> str:
    return "Skip" if node is SKIP else render(node)


def lts_to_dot(lts: TypeLts) -> str:
    """DOT rendering with type-labelled nodes and action-labelled edges."""
    nodes = sorted(lts.adjacency, key=_node_label)
    index = {node: i for i, node in enumerate(nodes)}
    lines = ["digraph lts {"]
    for node in nodes:
        shape = "doublecircle" if node is lts.root else "ellipse"
        label = _node_label(node).replace('"', '\\"')
        lines.append(f'  n{index[node]} [label="{label}", shape={shape}];')
    for node in nodes:
        for a in sorted(lts.adjacency[node]):
            dst = lts.adjacency[node][a]
            lines.append(
                f'  n{index[node]} -> n{index[dst]} [label="{action_name(a)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
