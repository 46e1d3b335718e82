"""Derivation trees shared by both type systems.

Each node stores its full judgment. The constructors below compute the
conclusion of a rule from its premises, including the index tuple when
the premises carry one, so transformers never do index arithmetic by
hand. Whether a tree is valid is a separate question for the checkers.
"""
from __future__ import annotations

import contextlib
import contextvars
import json
from dataclasses import dataclass

from .errors import FormatError, ParseError, ShapeMismatch
from .syntax import (
    Abs, App, Match, PPair, PVar, Pair, Var,
    PATTERN_TYPES, alpha_eq, parse, parse_pattern, pattern_vars, show, show_pattern,
)
from .types import (
    EMPTY_CONTEXT, Arrow, Multiset, Product, TIGHT_M, TIGHT_N, TypingContext,
    context_meet, mset, parse_type, show_type,
)

TERM_RULES = ("ax", "many", "abs", "abs_p", "app", "app_p", "pair", "pair_p", "match")
PATTERN_RULES = ("pat_v", "pat_x", "pat_p")
RULES = TERM_RULES + PATTERN_RULES

_PAIR_E_READING = contextvars.ContextVar("pair_e_reading", default="sum")


@contextlib.contextmanager
def pair_e_reading(reading):
    """Within the block, ``pair`` nodes compute their e index as ``reading``.

    ``"sum"`` adds the e indices of both components. ``"paper"`` uses the
    printed variant, which adds the b index of the second component instead.
    """
    if reading not in ("sum", "paper"):
        raise ValueError(f"unknown pair reading {reading!r}")
    token = _PAIR_E_READING.set(reading)
    try:
        yield
    finally:
        _PAIR_E_READING.reset(token)


def current_pair_e_reading():
    return _PAIR_E_READING.get()


@dataclass(frozen=True)
class Judgment:
    context: TypingContext
    subject: object
    assigned: object
    indices: tuple = None


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgment
    premises: tuple = ()

    @property
    def context(self):
        return self.conclusion.context

    @property
    def subject(self):
        return self.conclusion.subject

    @property
    def assigned(self):
        return self.conclusion.assigned

    @property
    def indices(self):
        return self.conclusion.indices

    @property
    def indexed(self):
        return self.conclusion.indices is not None

    def is_pattern(self):
        return self.rule in PATTERN_RULES


def deriv_size(d):
    own = 0 if d.rule == "many" else 1
    return own + sum(deriv_size(p) for p in d.premises)


def nodes(d, path=()):
    """Pre-order walk yielding (path, node)."""
    yield path, d
    for i, p in enumerate(d.premises):
        yield from nodes(p, path + (i,))


# ---------------------------------------------------------------- constructors

def _node(rule, ctx, subject, assigned, indices, premises=()):
    return Derivation(rule, Judgment(ctx, subject, assigned, indices), tuple(premises))


def _sum(*tuples):
    return tuple(sum(xs) for xs in zip(*tuples))


def _idx(flag, value):
    return value if flag else None


def ax(name, sigma, indexed=False):
    return _node("ax", TypingContext({name: mset(sigma)}), Var(name), sigma, _idx(indexed, (0, 0, 0, 0)))


def many(premises, subject, indexed=None):
    premises = tuple(premises)
    if indexed is None:
        if not premises:
            raise ValueError("an empty many node needs an explicit indexed flag")
        indexed = premises[0].indexed
    ctx = context_meet([p.context for p in premises])
    idx = _sum((0, 0, 0, 0), *(p.indices for p in premises)) if indexed else None
    return _node("many", ctx, subject, Multiset(tuple(p.assigned for p in premises)), idx, premises)


def abs_(body, pat):
    p = pat.subject
    ctx = body.context.erase(pattern_vars(p))
    idx = None
    if body.indexed:
        b, e, m, f = body.indices
        ep, mp, fp = pat.indices
        idx = (b + 1, e + ep, m + mp, f + fp)
    return _node("abs", ctx, Abs(p, body.subject), Arrow(pat.assigned, body.assigned), idx, (body, pat))


def abs_p(body, pattern):
    b, e, m, f = body.indices
    ctx = body.context.erase(pattern_vars(pattern))
    return _node("abs_p", ctx, Abs(pattern, body.subject), TIGHT_M, (b, e, m, f + 1), (body,))


def app(fun, arg):
    if not isinstance(fun.assigned, Arrow):
        raise ShapeMismatch("function premise is not typed by an arrow", (), "arrow", show_type(fun.assigned))
    ctx = context_meet([fun.context, arg.context])
    idx = _sum(fun.indices, arg.indices) if fun.indexed else None
    return _node("app", ctx, App(fun.subject, arg.subject), fun.assigned.codomain, idx, (fun, arg))


def app_p(fun, arg_term):
    b, e, m, f = fun.indices
    return _node("app_p", fun.context, App(fun.subject, arg_term), TIGHT_N, (b, e, m, f + 1), (fun,))


def pair(left, right):
    ctx = context_meet([left.context, right.context])
    idx = None
    if left.indexed:
        idx = list(_sum(left.indices, right.indices))
        if current_pair_e_reading() == "paper":
            idx[1] = left.indices[1] + right.indices[0]
        idx = tuple(idx)
    ty = Product(left.assigned, right.assigned)
    return _node("pair", ctx, Pair(left.subject, right.subject), ty, idx, (left, right))


def pair_p(term):
    return _node("pair_p", EMPTY_CONTEXT, term, TIGHT_M, (0, 0, 0, 1))


def match(body, pat, arg):
    p = pat.subject
    ctx = context_meet([body.context.erase(pattern_vars(p)), arg.context])
    idx = None
    if body.indexed:
        bt, et, mt, ft = body.indices
        bu, eu, mu, fu = arg.indices
        ep, mp, fp = pat.indices
        idx = (bt + bu, et + eu + ep, mt + mu + mp, ft + fu + fp)
    return _node("match", ctx, Match(body.subject, p, arg.subject), body.assigned, idx, (body, pat, arg))


def pat_v(name, multiset, indexed=False):
    return _node("pat_v", TypingContext({name: multiset}), PVar(name), multiset, _idx(indexed, (1, 0, 0)))


def pat_x(left, right):
    ctx = context_meet([left.context, right.context])
    idx = None
    if left.indexed:
        el, ml, fl = left.indices
        er, mr, fr = right.indices
        idx = (el + er, 1 + ml + mr, fl + fr)
    ty = mset(Product(left.assigned, right.assigned))
    return _node("pat_x", ctx, PPair(left.subject, right.subject), ty, idx, (left, right))


def pat_p(pattern, ctx):
    return _node("pat_p", ctx, pattern, mset(TIGHT_N), (0, 0, 1))


def type_pattern(p, ctx, indexed=False):
    """Pattern derivation built from ``pat_v`` and ``pat_x``, reading types off ctx."""
    if isinstance(p, PVar):
        return pat_v(p.name, ctx(p.name), indexed)
    return pat_x(type_pattern(p.left, ctx, indexed), type_pattern(p.right, ctx, indexed))


def rebuild(d, premises, subject):
    """Re-apply the rule of d to new premises, recomputing the conclusion."""
    r = d.rule
    if r == "ax":
        return ax(subject.name, d.assigned, d.indexed)
    if r == "many":
        return many(premises, subject, d.indexed)
    if r == "abs":
        return abs_(*premises)
    if r == "abs_p":
        return abs_p(premises[0], subject.pattern)
    if r == "app":
        return app(*premises)
    if r == "app_p":
        return app_p(premises[0], subject.arg)
    if r == "pair":
        return pair(*premises)
    if r == "pair_p":
        return pair_p(subject)
    if r == "match":
        return match(*premises)
    raise ValueError(f"cannot rebuild a {r} node")


# ---------------------------------------------------------------- alignment

def align(d, target, env=None, path=()):
    """Rebuild d so that its subject is exactly ``target``.

    ``target`` must have the same shape as d's subject, differing only
    in bound names. ``env`` maps the names bound above this node in d's
    subject to the corresponding names in the target.
    """
    env = env or {}
    if not env and not path and _exact(d, target):
        return d
    r, s = d.rule, d.subject

    def bad(why):
        return ShapeMismatch(why, path, _text(target), _text(s))

    if r in PATTERN_RULES:
        if r == "pat_v":
            if not isinstance(target, PVar):
                raise bad("pattern shape differs")
            return pat_v(target.name, d.assigned, d.indexed)
        if not isinstance(target, PPair) or not isinstance(s, PPair):
            raise bad("pattern shape differs")
        if r == "pat_p":
            return pat_p(target, d.context.rename(env))
        return pat_x(align(d.premises[0], target.left, env, path + (0,)),
                     align(d.premises[1], target.right, env, path + (1,)))
    if r == "many":
        return many([align(p, target, env, path + (i,)) for i, p in enumerate(d.premises)], target, d.indexed)
    if type(target) is not type(s):
        raise bad("term shape differs")
    if r == "ax":
        if env.get(s.name, s.name) != target.name:
            raise bad("variable does not correspond")
        return ax(target.name, d.assigned, d.indexed)
    if r == "pair_p":
        return pair_p(target)
    if r in ("abs", "abs_p", "match"):
        inner = dict(env)
        inner.update(zip(pattern_vars(s.pattern), pattern_vars(target.pattern)))
        body = align(d.premises[0], target.body, inner, path + (0,))
        if r == "abs_p":
            return abs_p(body, target.pattern)
        pat = align(d.premises[1], target.pattern, inner, path + (1,))
        if r == "abs":
            return abs_(body, pat)
        return match(body, pat, align(d.premises[2], target.arg, env, path + (2,)))
    if r == "app":
        return app(align(d.premises[0], target.fun, env, path + (0,)),
                   align(d.premises[1], target.arg, env, path + (1,)))
    if r == "app_p":
        return app_p(align(d.premises[0], target.fun, env, path + (0,)), target.arg)
    if r == "pair":
        return pair(align(d.premises[0], target.fst, env, path + (0,)),
                    align(d.premises[1], target.snd, env, path + (1,)))
    raise bad(f"unknown rule {r}")


_SUBJECT_PARTS = {
    "abs": ("body", "pattern"), "abs_p": ("body",), "app": ("fun", "arg"), "app_p": ("fun",),
    "pair": ("fst", "snd"), "match": ("body", "pattern", "arg"), "pat_x": ("left", "right"),
}


def _exact(d, target):
    """Every node's subject already equals the matching part of target."""
    if d.subject is not target and d.subject != target:
        return False
    if d.rule == "many":
        return all(_exact(p, target) for p in d.premises)
    parts = _SUBJECT_PARTS.get(d.rule, ())
    return all(_exact(p, getattr(target, f)) for p, f in zip(d.premises, parts))


def _text(x):
    if x is None:
        return None
    if isinstance(x, PATTERN_TYPES):
        return show_pattern(x)
    return show(x)


# ---------------------------------------------------------------- equality

def judgment_equal(a, b):
    """Same rules and judgments everywhere; many premises compared as multisets."""
    ja, jb = a.conclusion, b.conclusion
    if a.rule != b.rule or ja.context != jb.context or ja.assigned != jb.assigned or ja.indices != jb.indices:
        return False
    if a.is_pattern():
        if ja.subject != jb.subject:
            return False
    elif not alpha_eq(ja.subject, jb.subject):
        return False
    if len(a.premises) != len(b.premises):
        return False
    if a.rule != "many":
        return all(judgment_equal(x, y) for x, y in zip(a.premises, b.premises))
    return _match_all(list(a.premises), list(b.premises))


def _match_all(xs, ys):
    if not xs:
        return True
    x = xs[0]
    for i, y in enumerate(ys):
        if judgment_equal(x, y) and _match_all(xs[1:], ys[:i] + ys[i + 1:]):
            return True
    return False


# ---------------------------------------------------------------- JSON

def serialize(d):
    node = {
        "rule": d.rule,
        "context": [[k, show_type(v)] for k, v in d.context.items()],
        "subject": _text(d.subject),
        "assigned": show_type(d.assigned),
    }
    if d.indices is not None:
        node["indices"] = list(d.indices)
    node["premises"] = [serialize(p) for p in d.premises]
    return node


def to_json(d, indent=1):
    return json.dumps(serialize(d), indent=indent, ensure_ascii=False)


def deserialize(doc, _path=()):
    if not isinstance(doc, dict):
        raise FormatError(f"node at {list(_path)} is not an object")
    missing = {"rule", "context", "subject", "assigned", "premises"} - set(doc)
    if missing:
        raise FormatError(f"node at {list(_path)} lacks {sorted(missing)}")
    extra = set(doc) - {"rule", "context", "subject", "assigned", "indices", "premises"}
    if extra:
        raise FormatError(f"node at {list(_path)} has unknown fields {sorted(extra)}")
    rule = doc["rule"]
    if rule not in RULES:
        raise FormatError(f"unknown rule {rule!r} at {list(_path)}")
    try:
        entries = {}
        if not isinstance(doc["context"], list):
            raise FormatError("context must be a list")
        for entry in doc["context"]:
            if not (isinstance(entry, list) and len(entry) == 2 and all(isinstance(x, str) for x in entry)):
                raise FormatError(f"bad context entry {entry!r}")
            name, ty = entry
            if name in entries:
                raise FormatError(f"duplicate context entry for {name}")
            m = parse_type(ty)
            if not isinstance(m, Multiset):
                raise FormatError(f"context entry for {name} is not a multiset")
            entries[name] = m
        subject = parse_pattern(doc["subject"]) if rule in PATTERN_RULES else parse(doc["subject"])
        assigned = parse_type(doc["assigned"])
    except ParseError as exc:
        raise FormatError(f"at {list(_path)}: {exc}") from exc
    indices = doc.get("indices")
    if indices is not None:
        want = 3 if rule in PATTERN_RULES else 4
        if not (isinstance(indices, list) and len(indices) == want
                and all(isinstance(i, int) and not isinstance(i, bool) for i in indices)):
            raise FormatError(f"bad indices at {list(_path)}: {indices!r}")
        indices = tuple(indices)
    if not isinstance(doc["premises"], list):
        raise FormatError(f"premises at {list(_path)} must be a list")
    premises = tuple(deserialize(p, _path + (i,)) for i, p in enumerate(doc["premises"]))
    return Derivation(rule, Judgment(TypingContext(entries), subject, assigned, indices), premises)


def from_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not JSON: {exc}") from exc
    return deserialize(doc)
