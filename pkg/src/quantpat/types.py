"""Types shared by both systems, multiset arithmetic and typing contexts.

Multisets keep their elements sorted by a canonical order, so ordinary
structural equality and hashing already identify permutations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import ParseError
from .syntax import pattern_vars

STAR, STAR_N, STAR_M = "*", "*N", "*M"


@dataclass(frozen=True)
class Base:
    which: str

    def __post_init__(self):
        if self.which not in (STAR, STAR_N, STAR_M):
            raise ValueError(f"unknown base type {self.which!r}")


@dataclass(frozen=True)
class Multiset:
    items: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(sorted(self.items, key=type_key)))

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __bool__(self):
        return bool(self.items)


@dataclass(frozen=True)
class Product:
    left: Multiset
    right: Multiset


@dataclass(frozen=True)
class Arrow:
    domain: Multiset
    codomain: "SimpleType"


SimpleType = Union[Base, Product, Arrow]

def mset(*items):
    return Multiset(tuple(items))


def type_key(t):
    """Total order on types, used only to normalise multisets."""
    if isinstance(t, Base):
        return (0, t.which)
    if isinstance(t, Product):
        return (1, type_key(t.left), type_key(t.right))
    if isinstance(t, Arrow):
        return (2, type_key(t.domain), type_key(t.codomain))
    if isinstance(t, Multiset):
        return tuple(type_key(i) for i in t.items)
    raise TypeError(f"not a type: {t!r}")


STAR_T = Base(STAR)
TIGHT_N = Base(STAR_N)
TIGHT_M = Base(STAR_M)
EMPTY = Multiset()


def multiset_union(a, b):
    return Multiset(a.items + b.items)


def bases(t):
    """Set of base constants occurring in a type, multiset or context."""
    if isinstance(t, Base):
        return {t.which}
    if isinstance(t, Product):
        return bases(t.left) | bases(t.right)
    if isinstance(t, Arrow):
        return bases(t.domain) | bases(t.codomain)
    if isinstance(t, Multiset):
        out = set()
        for i in t.items:
            out |= bases(i)
        return out
    if isinstance(t, TypingContext):
        out = set()
        for _, a in t.items():
            out |= bases(a)
        return out
    raise TypeError(f"not a type: {t!r}")


# ---------------------------------------------------------------- contexts

class TypingContext:
    """Total map from names to multisets; only non-empty entries are stored."""

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping=None):
        m = {}
        for k, v in (mapping or {}).items():
            if not isinstance(v, Multiset):
                raise TypeError(f"context entry for {k} is not a multiset")
            if v:
                m[k] = v
        self._map = m
        self._hash = None

    def __call__(self, name):
        return self._map.get(name, EMPTY)

    get = __call__

    def domain(self):
        return frozenset(self._map)

    def items(self):
        return sorted(self._map.items())

    def __eq__(self, other):
        return isinstance(other, TypingContext) and self._map == other._map

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __len__(self):
        return len(self._map)

    def __repr__(self):
        return f"TypingContext({dict(self.items())!r})"

    def __str__(self):
        return show_context(self)

    def meet(self, other):
        return context_meet([self, other])

    def restrict(self, names):
        names = set(names)
        return TypingContext({k: v for k, v in self._map.items() if k in names})

    def erase(self, names):
        names = set(names)
        return TypingContext({k: v for k, v in self._map.items() if k not in names})

    def rename(self, mapping):
        out = {}
        for k, v in self._map.items():
            k2 = mapping.get(k, k)
            if k2 in out:
                raise ValueError(f"renaming merges context entries on {k2}")
            out[k2] = v
        return TypingContext(out)


EMPTY_CONTEXT = TypingContext()


def context_meet(gs):
    out = {}
    for g in gs:
        for k, v in g._map.items():
            out[k] = multiset_union(out[k], v) if k in out else v
    return TypingContext(out)


def context_restrict(g, p):
    return g.restrict(pattern_vars(p))


def context_erase(g, names):
    return g.erase(names)


def is_tight(subject):
    if isinstance(subject, Base):
        return subject.which in (STAR_N, STAR_M)
    if isinstance(subject, (Product, Arrow)):
        return False
    if isinstance(subject, Multiset):
        return all(is_tight(i) for i in subject.items)
    if isinstance(subject, TypingContext):
        return all(is_tight(a) for _, a in subject.items())
    raise TypeError(f"cannot decide tightness of {subject!r}")


# ---------------------------------------------------------------- text

def show_type(t):
    if isinstance(t, Base):
        return t.which
    if isinstance(t, Multiset):
        return "[" + ", ".join(show_type(i) for i in t.items) + "]"
    if isinstance(t, Product):
        return f"{show_type(t.left)} x {show_type(t.right)}"
    if isinstance(t, Arrow):
        return f"{show_type(t.domain)} -> {show_type(t.codomain)}"
    raise TypeError(f"not a type: {t!r}")


def show_context(g):
    return "{" + ", ".join(f"{k}: {show_type(v)}" for k, v in g.items()) + "}"


_TYPE_TOKEN = re.compile(r"\s*(\*N|\*M|\*|->|\[|\]|,|\(|\)|x(?![A-Za-z0-9_]))")


def _type_tokens(text):
    out, pos = [], 0
    while True:
        m = _TYPE_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"bad type syntax near {text[pos:].strip()[:10]!r}", pos)
            out.append(("", len(text)))
            return out
        out.append((m.group(1), m.start(1)))
        pos = m.end()


def parse_type(text):
    """Parse a simple type or a multiset type."""
    toks = _type_tokens(text)
    i = 0

    def peek():
        return toks[i][0]

    def take(expect=None):
        nonlocal i
        tok, pos = toks[i]
        if expect is not None and tok != expect:
            raise ParseError(f"expected {expect!r}, got {tok or 'end of input'!r}", pos)
        i += 1
        return tok

    def multiset():
        take("[")
        items = []
        if peek() != "]":
            items.append(simple())
            while peek() == ",":
                take(",")
                items.append(simple())
        take("]")
        return Multiset(tuple(items))

    def any_type():
        # a multiset may stand alone or start a product / arrow
        if peek() == "(":
            take("(")
            t = any_type()
            take(")")
            return t
        if peek() in (STAR, STAR_N, STAR_M):
            return Base(take())
        if peek() == "[":
            a = multiset()
            if peek() == "x":
                take("x")
                return Product(a, multiset())
            if peek() == "->":
                take("->")
                return Arrow(a, simple_of(any_type()))
            return a
        tok, pos = toks[i]
        raise ParseError(f"unexpected {tok or 'end of input'!r} in type", pos)

    def simple_of(t):
        if isinstance(t, Multiset):
            raise ParseError("expected a simple type, got a multiset", toks[i][1])
        return t

    def simple():
        return simple_of(any_type())

    t = any_type()
    if peek() != "":
        raise ParseError(f"trailing input {peek()!r} in type", toks[i][1])
    return t
