"""Abstract syntax, concrete text format and structural operations.

Types are stored in a canonical nameless form: recursion binders carry no
name and bound occurrences are de Bruijn indices (``BoundVar``).  Every
node is hash-consed through a module-level interning table, so two
alpha-equivalent types built in any order are the *same* Python object and
equality/hashing are identity-based and O(1).

Construction goes through the factory functions (``end``, ``var``,
``bvar``, ``rec``, ``mu``, ``inp``, ``out``, ``select``, ``branch``);
calling the class constructors directly bypasses interning and breaks the
identity-equality invariant.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping, Optional, Tuple, Union

from .errors import (
    DuplicateLabelError,
    EmptyArityError,
    NotContractiveError,
    ParseError,
)

__all__ = [
    "TypeExpr", "End", "Var", "BoundVar", "Rec", "Input", "Output",
    "Select", "Branch",
    "end", "var", "bvar", "rec", "mu", "inp", "out", "select", "branch",
    "parse", "render", "size", "is_contractive", "is_closed",
    "free_names", "substitute", "unfold", "shift",
]

Branches = Tuple[Tuple[str, "TypeExpr"], ...]

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class TypeExpr:
    """Base class of the session-type AST.

    Instances are immutable and interned; ``a == b`` iff ``a is b`` iff a
    and b are alpha-equivalent (with label maps compared up to ordering).

    Shared precomputed attributes:

    ``size``
        the standard size measure (see :func:`size`).
    ``cutoff``
        number of enclosing binders required for all de Bruijn indices to
        resolve; 0 means no dangling indices.
    ``has_fvar``
        whether any named (free) variable occurs.
    ``contractive``
        whether every recursion binder is separated from its bound
        occurrences by at least one communication constructor.
    """

    __slots__ = ("size", "cutoff", "has_fvar", "contractive", "_chain")

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {render(self)!r}>"

    def __str__(self) -> str:
        return render(self)


class End(TypeExpr):
    __slots__ = ()


class Var(TypeExpr):
    __slots__ = ("name",)


class BoundVar(TypeExpr):
    __slots__ = ("index",)


class Rec(TypeExpr):
    __slots__ = ("body",)
    __match_args__ = ("body",)


class Input(TypeExpr):
    __slots__ = ("payloads", "cont")
    __match_args__ = ("payloads", "cont")


class Output(TypeExpr):
    __slots__ = ("payloads", "cont")
    __match_args__ = ("payloads", "cont")


class Select(TypeExpr):
    __slots__ = ("branches",)
    __match_args__ = ("branches",)


class Branch(TypeExpr):
    __slots__ = ("branches",)
    __match_args__ = ("branches",)


# dict.setdefault is atomic under the GIL, which gives us lock-free
# concurrent interning: the first inserted node wins.
_interned: dict = {}


def _intern(key, node: TypeExpr) -> TypeExpr:
    return _interned.setdefault(key, node)


def end() -> End:
    node = End()
    node.size = 1
    node.cutoff = 0
    node.has_fvar = False
    node.contractive = True
    node._chain = None
    return _intern((End,), node)


def var(name: str) -> Var:
    if not _IDENT_RE.match(name or ""):
        raise ValueError(f"invalid variable name: {name!r}")
    node = Var()
    node.name = name
    node.size = 1
    node.cutoff = 0
    node.has_fvar = True
    node.contractive = True
    node._chain = None
    return _intern((Var, name), node)


def bvar(index: int) -> BoundVar:
    if index < 0:
        raise ValueError("de Bruijn index must be >= 0")
    node = BoundVar()
    node.index = index
    node.size = 1
    node.cutoff = index + 1
    node.has_fvar = False
    node.contractive = True
    # _chain = (number of Recs wrapped so far, index at the chain's end)
    node._chain = (0, index)
    return _intern((BoundVar, index), node)


def rec(body: TypeExpr) -> Rec:
    """Nameless recursion binder; ``bvar(0)`` in *body* refers to it."""
    node = Rec()
    node.body = body
    node.size = body.size + 1
    node.cutoff = max(0, body.cutoff - 1)
    node.has_fvar = body.has_fvar
    chain = body._chain
    if chain is None:
        node.contractive = body.contractive
        node._chain = None
    else:
        wrapped, index = chain
        # Rec^{wrapped+1}(BoundVar(index)) cycles iff the index points at
        # one of the binders of this very chain.
        node.contractive = body.contractive and index > wrapped
        node._chain = (wrapped + 1, index)
    return _intern((Rec, body), node)


def mu(name: str, body: TypeExpr) -> Rec:
    """Named recursion: binds free occurrences of ``var(name)`` in *body*."""
    return rec(_bind(body, name, 0))


def _bind(t: TypeExpr, name: str, depth: int) -> TypeExpr:
    if isinstance(t, Var):
        return bvar(depth) if t.name == name else t
    if not t.has_fvar:
        return t
    if isinstance(t, Rec):
        return rec(_bind(t.body, name, depth + 1))
    if isinstance(t, Input):
        return inp([_bind(p, name, depth) for p in t.payloads],
                   _bind(t.cont, name, depth))
    if isinstance(t, Output):
        return out([_bind(p, name, depth) for p in t.payloads],
                   _bind(t.cont, name, depth))
    if isinstance(t, Select):
        return select([(l, _bind(b, name, depth)) for l, b in t.branches])
    if isinstance(t, Branch):
        return branch([(l, _bind(b, name, depth)) for l, b in t.branches])
    return t


def _payload_node(cls, payloads: Iterable[TypeExpr], cont: TypeExpr):
    payloads = tuple(payloads)
    if not payloads:
        raise EmptyArityError("payload list must be non-empty")
    node = cls()
    node.payloads = payloads
    node.cont = cont
    node.size = sum(p.size for p in payloads) + cont.size + 1
    node.cutoff = max(cont.cutoff, max(p.cutoff for p in payloads))
    node.has_fvar = cont.has_fvar or any(p.has_fvar for p in payloads)
    node.contractive = cont.contractive and all(p.contractive for p in payloads)
    node._chain = None
    return _intern((cls, payloads, cont), node)


def inp(payloads: Iterable[TypeExpr], cont: TypeExpr) -> Input:
    return _payload_node(Input, payloads, cont)


def out(payloads: Iterable[TypeExpr], cont: TypeExpr) -> Output:
    return _payload_node(Output, payloads, cont)


def _branch_node(cls, branches):
    if isinstance(branches, Mapping):
        branches = branches.items()
    items = sorted(branches)  # canonical label order
    if not items:
        raise EmptyArityError("label map must be non-empty")
    labels = [l for l, _ in items]
    for l in labels:
        if not _IDENT_RE.match(l):
            raise ValueError(f"invalid label: {l!r}")
    for a, b in zip(labels, labels[1:]):
        if a == b:
            raise DuplicateLabelError(f"duplicate label {a!r}")
    items = tuple(items)
    node = cls()
    node.branches = items
    node.size = sum(b.size for _, b in items) + 1
    node.cutoff = max(b.cutoff for _, b in items)
    node.has_fvar = any(b.has_fvar for _, b in items)
    node.contractive = all(b.contractive for _, b in items)
    node._chain = None
    return _intern((cls, items), node)


def select(branches) -> Select:
    return _branch_node(Select, branches)


def branch(branches) -> Branch:
    return _branch_node(Branch, branches)


def size(t: TypeExpr) -> int:
    return t.size


def is_contractive(t: TypeExpr) -> bool:
    return t.contractive


def is_closed(t: TypeExpr) -> bool:
    return t.cutoff == 0 and not t.has_fvar


def free_names(t: TypeExpr) -> frozenset:
    """Set of named free variables (binder indices are never free names)."""
    if not t.has_fvar:
        return frozenset()
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Rec):
        return free_names(t.body)
    if isinstance(t, (Input, Output)):
        acc = free_names(t.cont)
        for p in t.payloads:
            acc |= free_names(p)
        return acc
    acc = frozenset()
    for _, b in t.branches:
        acc |= free_names(b)
    return acc


def shift(t: TypeExpr, by: int, floor: int = 0) -> TypeExpr:
    """Add *by* to every dangling de Bruijn index >= *floor*."""
    if t.cutoff <= floor or by == 0:
        return t
    if isinstance(t, BoundVar):
        return bvar(t.index + by) if t.index >= floor else t
    if isinstance(t, Rec):
        return rec(shift(t.body, by, floor + 1))
    if isinstance(t, Input):
        return inp([shift(p, by, floor) for p in t.payloads],
                   shift(t.cont, by, floor))
    if isinstance(t, Output):
        return out([shift(p, by, floor) for p in t.payloads],
                   shift(t.cont, by, floor))
    if isinstance(t, Select):
        return select([(l, shift(b, by, floor)) for l, b in t.branches])
    return branch([(l, shift(b, by, floor)) for l, b in t.branches])


def subst_top(t: TypeExpr, s: TypeExpr, depth: int = 0) -> TypeExpr:
    """Replace the binder variable at *depth* in *t* by *s* and strip that
    binder level (dangling indices above *depth* shift down by one)."""
    if t.cutoff <= depth:
        return t
    if isinstance(t, BoundVar):
        if t.index == depth:
            return shift(s, depth)
        if t.index > depth:
            return bvar(t.index - 1)
        return t
    if isinstance(t, Rec):
        return rec(subst_top(t.body, s, depth + 1))
    if isinstance(t, Input):
        return inp([subst_top(p, s, depth) for p in t.payloads],
                   subst_top(t.cont, s, depth))
    if isinstance(t, Output):
        return out([subst_top(p, s, depth) for p in t.payloads],
                   subst_top(t.cont, s, depth))
    if isinstance(t, Select):
        return select([(l, subst_top(b, s, depth)) for l, b in t.branches])
    return branch([(l, subst_top(b, s, depth)) for l, b in t.branches])


def substitute(t: TypeExpr, x: str, s: TypeExpr) -> TypeExpr:
    """Replace free occurrences of the named variable *x* in *t* by *s*.

    Capture is impossible by construction: binders bind indices, never
    names, so a named variable can never be captured by a binder of *t*.
    *s* must not contain dangling indices of its own.
    """
    if s.cutoff != 0:
        raise ValueError("replacement type has dangling binder indices")
    if not t.has_fvar:
        return t
    if isinstance(t, Var):
        return s if t.name == x else t
    if isinstance(t, Rec):
        return rec(substitute(t.body, x, s))
    if isinstance(t, Input):
        return inp([substitute(p, x, s) for p in t.payloads],
                   substitute(t.cont, x, s))
    if isinstance(t, Output):
        return out([substitute(p, x, s) for p in t.payloads],
                   substitute(t.cont, x, s))
    if isinstance(t, Select):
        return select([(l, substitute(b, x, s)) for l, b in t.branches])
    return branch([(l, substitute(b, x, s)) for l, b in t.branches])


_unfold_cache: dict = {}


def unfold(t: TypeExpr) -> TypeExpr:
    """Strip recursion binders from the head by repeated substitution.

    Terminates on contractive input; the result never has ``Rec`` at the
    head and equals *t* when *t* is not a ``Rec``.
    """
    if not isinstance(t, Rec):
        return t
    u = _unfold_cache.get(t)
    if u is None:
        if not t.contractive:
            raise NotContractiveError(f"cannot unfold {render(t)}")
        u = unfold(subst_top(t.body, t))
        _unfold_cache[t] = u
    return u


# ---------------------------------------------------------------------------
# Concrete syntax
#
#   T ::= end | X | rec X . T | ?[T, ...].T | ![T, ...].T
#       | +{ l: T, ... } | &{ l: T, ... }
#
# Variables start uppercase, labels lowercase; '#' starts a line comment.
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
      (?P<ws>[ \t\r\n]+|\#[^\n]*)
    | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
    | (?P<punct>\?\[|!\[|\+\{|&\{|[\]\}.,:])
""", re.VERBOSE)


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tok: Optional[Tuple[str, str, int, int]] = None
        self._advance()

    def _advance(self) -> None:
        while True:
            if self.pos >= len(self.text):
                self.tok = ("eof", "", self.line, self.col)
                return
            m = _TOKEN_RE.match(self.text, self.pos)
            if m is None:
                raise ParseError(
                    f"unexpected character {self.text[self.pos]!r}",
                    self.line, self.col)
            kind = m.lastgroup
            value = m.group()
            line, col = self.line, self.col
            for ch in value:
                if ch == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
            self.pos = m.end()
            if kind == "ws":
                continue
            self.tok = (kind, value, line, col)
            return

    def take(self) -> Tuple[str, str, int, int]:
        tok = self.tok
        self._advance()
        return tok

    def expect(self, punct: str) -> None:
        kind, value, line, col = self.tok
        if kind == "punct" and value == punct:
            self._advance()
            return
        raise ParseError(f"expected {punct!r}, found {value or 'end of input'!r}",
                         line, col)


def parse(text: str) -> TypeExpr:
    """Parse the concrete syntax; the result is closed under its binders,
    contractive and canonically interned.

    Raises :class:`ParseError`, :class:`NotContractiveError`,
    :class:`DuplicateLabelError` or :class:`EmptyArityError`.
    """
    lexer = _Lexer(text)
    t = _parse_type(lexer, [])
    kind, value, line, col = lexer.tok
    if kind != "eof":
        raise ParseError(f"trailing input starting at {value!r}", line, col)
    if not t.contractive:
        raise NotContractiveError(f"type is not contractive: {text.strip()}")
    return t


def _parse_type(lx: _Lexer, binders: list) -> TypeExpr:
    kind, value, line, col = lx.take()
    if kind == "ident":
        if value == "end":
            return end()
        if value == "rec":
            nkind, name, nline, ncol = lx.take()
            if nkind != "ident" or not name[0].isupper():
                raise ParseError("expected recursion variable after 'rec'",
                                 nline, ncol)
            lx.expect(".")
            binders.append(name)
            try:
                body = _parse_type(lx, binders)
            finally:
                binders.pop()
            return rec(body)
        if value[0].isupper():
            for depth, bound in enumerate(reversed(binders)):
                if bound == value:
                    return bvar(depth)
            return var(value)
        raise ParseError(f"unexpected identifier {value!r} "
                         "(variables start uppercase)", line, col)
    if kind == "punct" and value in ("?[", "!["):
        payloads = [_parse_type(lx, binders)]
        while lx.tok[:2] == ("punct", ","):
            lx.take()
            payloads.append(_parse_type(lx, binders))
        lx.expect("]")
        lx.expect(".")
        cont = _parse_type(lx, binders)
        return inp(payloads, cont) if value == "?[" else out(payloads, cont)
    if kind == "punct" and value in ("+{", "&{"):
        items = [_parse_branch(lx, binders)]
        while lx.tok[:2] == ("punct", ","):
            lx.take()
            items.append(_parse_branch(lx, binders))
        lx.expect("}")
        seen = set()
        for l, _ in items:
            if l in seen:
                raise DuplicateLabelError(f"duplicate label {l!r}")
            seen.add(l)
        return select(items) if value == "+{" else branch(items)
    raise ParseError(f"expected a type, found {value or 'end of input'!r}",
                     line, col)


def _parse_branch(lx: _Lexer, binders: list) -> Tuple[str, TypeExpr]:
    kind, label, line, col = lx.take()
    if kind != "ident" or not label[0].islower() or label in ("end", "rec"):
        raise ParseError("expected a label (lowercase identifier)", line, col)
    lx.expect(":")
    return label, _parse_type(lx, binders)


def _binder_names(t: TypeExpr) -> Iterator[str]:
    taken = free_names(t)
    for name in ("X", "Y", "Z", "W", "S", "T", "U", "V"):
        if name not in taken:
            yield name
    i = 1
    while True:
        for base in ("X", "Y", "Z", "W"):
            name = f"{base}{i}"
            if name not in taken:
                yield name
        i += 1


def render(t: TypeExpr) -> str:
    """Deterministic concrete syntax; re-parses to the identical value."""
    names = _binder_names(t)
    return _render(t, [], names)


def _render(t: TypeExpr, env: list, names: Iterator[str]) -> str:
    if isinstance(t, End):
        return "end"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, BoundVar):
        if t.index < len(env):
            return env[-1 - t.index]
        return f"'{t.index - len(env)}"  # dangling index, debug rendering
    if isinstance(t, Rec):
        name = next(names)
        env.append(name)
        try:
            body = _render(t.body, env, names)
        finally:
            env.pop()
        return f"rec {name} . {body}"
    if isinstance(t, (Input, Output)):
        sigil = "?" if isinstance(t, Input) else "!"
        payloads = ", ".join(_render(p, env, names) for p in t.payloads)
        return f"{sigil}[{payloads}].{_render(t.cont, env, names)}"
    sigil = "+" if isinstance(t, Select) else "&"
    items = ", ".join(f"{l}: {_render(b, env, names)}" for l, b in t.branches)
    return f"{sigil}{{ {items} }}"
