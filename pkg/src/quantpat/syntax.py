"""Terms and patterns of the pair-pattern lambda calculus.

Terms are immutable dataclasses with named variables. Alpha-equivalence
is decided on a nameless key, and every renaming picks names of the form
``base + k`` with the smallest ``k >= 1`` that is not taken, so runs are
reproducible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import LinearityError, ParseError


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PPair:
    left: "Pattern"
    right: "Pattern"


Pattern = Union[PVar, PPair]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    pattern: Pattern
    body: "Term"


@dataclass(frozen=True)
class Pair:
    fst: "Term"
    snd: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Match:
    """``body[pattern/arg]``: the pattern binds in ``body`` only."""
    body: "Term"
    pattern: Pattern
    arg: "Term"


Term = Union[Var, Abs, Pair, App, Match]
TERM_TYPES = (Var, Abs, Pair, App, Match)
PATTERN_TYPES = (PVar, PPair)


# ---------------------------------------------------------------- patterns

def pattern_vars(p):
    """Variables of a pattern, left to right."""
    if isinstance(p, PVar):
        return [p.name]
    return pattern_vars(p.left) + pattern_vars(p.right)


def is_linear(p):
    vs = pattern_vars(p)
    return len(vs) == len(set(vs))


def rename_pattern(p, mapping):
    if isinstance(p, PVar):
        return PVar(mapping.get(p.name, p.name))
    return PPair(rename_pattern(p.left, mapping), rename_pattern(p.right, mapping))


# ---------------------------------------------------------------- variables

def free_vars(t):
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Abs):
        return free_vars(t.body) - frozenset(pattern_vars(t.pattern))
    if isinstance(t, Pair):
        return free_vars(t.fst) | free_vars(t.snd)
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    if isinstance(t, Match):
        return (free_vars(t.body) - frozenset(pattern_vars(t.pattern))) | free_vars(t.arg)
    raise TypeError(f"not a term: {t!r}")


def bound_vars(t):
    """Every name bound somewhere inside t."""
    if isinstance(t, Var):
        return frozenset()
    if isinstance(t, Abs):
        return frozenset(pattern_vars(t.pattern)) | bound_vars(t.body)
    if isinstance(t, (Pair, App)):
        a, b = children(t)
        return bound_vars(a) | bound_vars(b)
    return frozenset(pattern_vars(t.pattern)) | bound_vars(t.body) | bound_vars(t.arg)


def all_names(t):
    return free_vars(t) | bound_vars(t)


_SUFFIX = re.compile(r"^(.*?)(\d+)$")


def fresh_name(name, avoid):
    """Smallest ``base + k`` (k >= 1) outside ``avoid``; base drops trailing digits."""
    m = _SUFFIX.match(name)
    base = m.group(1) if m and m.group(1) else name
    k = 1
    while f"{base}{k}" in avoid:
        k += 1
    return f"{base}{k}"


def rename_free(t, mapping):
    """Rename free occurrences. Targets must not occur in t (so no capture)."""
    if not mapping:
        return t
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    if isinstance(t, Abs):
        inner = {k: v for k, v in mapping.items() if k not in pattern_vars(t.pattern)}
        return Abs(t.pattern, rename_free(t.body, inner))
    if isinstance(t, Pair):
        return Pair(rename_free(t.fst, mapping), rename_free(t.snd, mapping))
    if isinstance(t, App):
        return App(rename_free(t.fun, mapping), rename_free(t.arg, mapping))
    inner = {k: v for k, v in mapping.items() if k not in pattern_vars(t.pattern)}
    return Match(rename_free(t.body, inner), t.pattern, rename_free(t.arg, mapping))


def rename_binder(pattern, body, clash, taken):
    """Rename the variables of ``pattern`` that lie in ``clash``.

    ``taken`` is a set of names to stay clear of; it is extended in place
    with the names chosen. Returns the new pattern and body.
    """
    mapping = {}
    for v in pattern_vars(pattern):
        if v in clash:
            new = fresh_name(v, taken)
            taken.add(new)
            mapping[v] = new
    if not mapping:
        return pattern, body
    return rename_pattern(pattern, mapping), rename_free(body, mapping)


def fresh_rename(t, avoid):
    """Alpha-variant of t whose bound variables are disjoint from ``avoid``."""
    avoid = frozenset(avoid)
    taken = set(avoid) | set(all_names(t))

    def go(s):
        if isinstance(s, Var):
            return s
        if isinstance(s, Abs):
            p, b = rename_binder(s.pattern, s.body, avoid, taken)
            return Abs(p, go(b))
        if isinstance(s, Pair):
            return Pair(go(s.fst), go(s.snd))
        if isinstance(s, App):
            return App(go(s.fun), go(s.arg))
        p, b = rename_binder(s.pattern, s.body, avoid, taken)
        return Match(go(b), p, go(s.arg))

    return go(t)


# ---------------------------------------------------------------- alpha

def _pattern_shape(p):
    if isinstance(p, PVar):
        return "v"
    return (_pattern_shape(p.left), _pattern_shape(p.right))


def alpha_key(t):
    """Nameless key: equal keys iff the terms are alpha-equivalent."""

    def go(s, env, depth):
        if isinstance(s, Var):
            return ("B",) + env[s.name] if s.name in env else ("F", s.name)
        if isinstance(s, Abs):
            inner = dict(env)
            for i, v in enumerate(pattern_vars(s.pattern)):
                inner[v] = (depth, i)
            return ("L", _pattern_shape(s.pattern), go(s.body, inner, depth + 1))
        if isinstance(s, Pair):
            return ("P", go(s.fst, env, depth), go(s.snd, env, depth))
        if isinstance(s, App):
            return ("A", go(s.fun, env, depth), go(s.arg, env, depth))
        inner = dict(env)
        for i, v in enumerate(pattern_vars(s.pattern)):
            inner[v] = (depth, i)
        return ("M", go(s.body, inner, depth + 1), _pattern_shape(s.pattern), go(s.arg, env, depth))

    return go(t, {}, 0)


def alpha_eq(a, b):
    if a == b:
        return True
    return alpha_key(a) == alpha_key(b)


# ---------------------------------------------------------------- positions

def children(t):
    if isinstance(t, Abs):
        return (t.body,)
    if isinstance(t, (Pair,)):
        return (t.fst, t.snd)
    if isinstance(t, App):
        return (t.fun, t.arg)
    if isinstance(t, Match):
        return (t.body, t.arg)
    return ()


def subterm_at(t, path):
    for i in path:
        kids = children(t)
        if i >= len(kids):
            raise IndexError(f"position {list(path)} does not resolve")
        t = kids[i]
    return t


def replace_at(t, path, new):
    if not path:
        return new
    i, rest = path[0], tuple(path[1:])
    if isinstance(t, Abs) and i == 0:
        return Abs(t.pattern, replace_at(t.body, rest, new))
    if isinstance(t, Pair) and i in (0, 1):
        return Pair(replace_at(t.fst, rest, new), t.snd) if i == 0 else Pair(t.fst, replace_at(t.snd, rest, new))
    if isinstance(t, App) and i in (0, 1):
        return App(replace_at(t.fun, rest, new), t.arg) if i == 0 else App(t.fun, replace_at(t.arg, rest, new))
    if isinstance(t, Match) and i in (0, 1):
        if i == 0:
            return Match(replace_at(t.body, rest, new), t.pattern, t.arg)
        return Match(t.body, t.pattern, replace_at(t.arg, rest, new))
    raise IndexError(f"position {list(path)} does not resolve")


def term_size(t):
    """Number of term constructors (patterns not counted)."""
    return 1 + sum(term_size(c) for c in children(t))


# ---------------------------------------------------------------- printing

def show_pattern(p):
    if isinstance(p, PVar):
        return p.name
    return f"<{show_pattern(p.left)}, {show_pattern(p.right)}>"


def show(t):
    """Concrete syntax accepted back by :func:`parse`."""
    return _show(t, 0)


def _show(t, level):
    # level 0: anything, 1: application head, 2: argument / matching body
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Pair):
        return f"<{_show(t.fst, 0)}, {_show(t.snd, 0)}>"
    if isinstance(t, Match):
        return f"{_show(t.body, 2)}[{show_pattern(t.pattern)}/{_show(t.arg, 0)}]"
    if isinstance(t, App):
        s = f"{_show(t.fun, 1)} {_show(t.arg, 2)}"
        return f"({s})" if level >= 2 else s
    s = f"\\{show_pattern(t.pattern)}. {_show(t.body, 0)}"
    return f"({s})" if level >= 1 else s


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_']*)|(?P<sym>[\\λ.<>,\[\]/()]))")


def _tokenize(text):
    tokens, pos = [], 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip():
                raise ParseError(f"unexpected character {rest.strip()[0]!r}", pos + len(rest) - len(rest.lstrip()))
            break
        kind = "ident" if m.group("ident") else "sym"
        val = m.group(kind)
        if val == "λ":
            val = "\\"
        tokens.append((kind, val, m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, sym=None):
        tok = self.tokens[self.i]
        if sym is not None and tok[1] != sym:
            got = tok[1] or "end of input"
            raise ParseError(f"expected {sym!r}, got {got!r}", tok[2])
        self.i += 1
        return tok

    def term(self):
        if self.peek()[1] == "\\":
            return self.abstraction()
        return self.application()

    def abstraction(self):
        self.take("\\")
        p = self.pattern()
        self.take(".")
        return Abs(p, self.term())

    def application(self):
        t = self.postfix()
        while True:
            kind, val, _ = self.peek()
            if kind == "ident" or val in ("<", "("):
                t = App(t, self.postfix())
            elif val == "\\":
                # a trailing abstraction argument extends to the right
                return App(t, self.abstraction())
            else:
                return t

    def postfix(self):
        t = self.atom()
        while self.peek()[1] == "[":
            self.take("[")
            p = self.pattern()
            self.take("/")
            u = self.term()
            self.take("]")
            t = Match(t, p, u)
        return t

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "ident":
            self.take()
            return Var(val)
        if val == "<":
            self.take()
            a = self.term()
            self.take(",")
            b = self.term()
            self.take(">")
            return Pair(a, b)
        if val == "(":
            self.take()
            t = self.term()
            self.take(")")
            return t
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)

    def pattern(self):
        start = self.peek()[2]
        p = self._pattern()
        seen = set()
        for v in pattern_vars(p):
            if v in seen:
                raise LinearityError(v, start)
            seen.add(v)
        return p

    def _pattern(self):
        kind, val, pos = self.peek()
        if kind == "ident":
            self.take()
            return PVar(val)
        if val == "<":
            self.take()
            a = self._pattern()
            self.take(",")
            b = self._pattern()
            self.take(">")
            return PPair(a, b)
        if val == "(":
            self.take()
            p = self._pattern()
            self.take(")")
            return p
        raise ParseError(f"expected a pattern, got {val or 'end of input'!r}", pos)


def parse(text, macros=None):
    """Parse a term. ``macros`` maps free names to closed terms to splice in."""
    parser = _Parser(text)
    t = parser.term()
    kind, val, pos = parser.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {val!r}", pos)
    if macros:
        if any(isinstance(v, str) for v in macros.values()):
            macros = macro_table(macros)
        t = expand_macros(t, macros)
    return t


def parse_pattern(text):
    parser = _Parser(text)
    p = parser.pattern()
    kind, val, pos = parser.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {val!r}", pos)
    return p


def expand_macros(t, macros):
    """Replace free occurrences of macro names by their (closed) definitions."""

    def go(s, bound):
        if isinstance(s, Var):
            if s.name in macros and s.name not in bound:
                return macros[s.name]
            return s
        if isinstance(s, Abs):
            return Abs(s.pattern, go(s.body, bound | set(pattern_vars(s.pattern))))
        if isinstance(s, Pair):
            return Pair(go(s.fst, bound), go(s.snd, bound))
        if isinstance(s, App):
            return App(go(s.fun, bound), go(s.arg, bound))
        return Match(go(s.body, bound | set(pattern_vars(s.pattern))), s.pattern, go(s.arg, bound))

    return go(t, frozenset())


def macro_table(definitions):
    """Build a macro table from ``name -> source`` pairs, resolving earlier names."""
    table = {}
    for name, src in definitions.items():
        t = parse(src, table)
        if free_vars(t):
            raise ParseError(f"macro {name} is not closed")
        table[name] = t
    return table


STANDARD_MACROS = {
    "I": "\\z. z",
    "K": "\\x. \\y. x",
    "Delta": "\\z. z z",
    "Omega": "Delta Delta",
}
