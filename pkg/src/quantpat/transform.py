"""Derivation transformers common to both systems.

Substitution, anti-substitution and subject reduction / expansion are
written once. The constructors in :mod:`quantpat.derivation` recompute
contexts and indices, so the same code serves the indexed system and
the plain one.
"""
from __future__ import annotations

from .derivation import (
    abs_, abs_p, align, app, app_p, ax, many, match, pair, pair_p, pat_v, pat_x, rebuild,
)
from .errors import ShapeMismatch
from .reduction import (
    StepKind, decompose_list_context, fire, head_redex, root_kind, substitute,
)
from .syntax import Var, alpha_eq, free_vars, pattern_vars, replace_at, show, subterm_at


def _expect(d, rule, path, what=None):
    rules = (rule,) if isinstance(rule, str) else rule
    if d.rule not in rules:
        raise ShapeMismatch(what or "unexpected rule", path, "/".join(rules), d.rule)


# ---------------------------------------------------------------- substitution

def subst(phi_t, x, phi_u):
    """Derivation of ``t{x:=u}`` from one of t (with x:A) and a many node for u:A."""
    _expect(phi_u, "many", (), "argument derivation must be a many node")
    if phi_t.context(x) != phi_u.assigned:
        raise ShapeMismatch("multiset of the substituted variable differs from the argument's",
                            (), phi_u.assigned, phi_t.context(x))
    u = phi_u.subject
    target = substitute(phi_t.subject, x, u)
    pool = list(phi_u.premises)

    def walk(d, tgt, env, active, path):
        if d.rule == "many":
            return many([walk(p, tgt, env, active, path + (i,)) for i, p in enumerate(d.premises)],
                        tgt, d.indexed)
        s = d.subject
        if not active or x not in free_vars(s):
            return align(d, tgt, env, path)
        r = d.rule
        if r == "ax":
            for i, p in enumerate(pool):
                if p.assigned == d.assigned:
                    del pool[i]
                    return align(p, tgt, {}, path)
            raise ShapeMismatch("no argument premise left for an occurrence", path, d.assigned, None)
        if r in ("abs", "abs_p", "match"):
            inner = dict(env)
            inner.update(zip(pattern_vars(s.pattern), pattern_vars(tgt.pattern)))
            in_body = x not in pattern_vars(s.pattern)
            body = walk(d.premises[0], tgt.body, inner, in_body, path + (0,))
            if r == "abs_p":
                return abs_p(body, tgt.pattern)
            pat = align(d.premises[1], tgt.pattern, inner, path + (1,))
            if r == "abs":
                return abs_(body, pat)
            return match(body, pat, walk(d.premises[2], tgt.arg, env, True, path + (2,)))
        if r == "app":
            return app(walk(d.premises[0], tgt.fun, env, True, path + (0,)),
                       walk(d.premises[1], tgt.arg, env, True, path + (1,)))
        if r == "app_p":
            return app_p(walk(d.premises[0], tgt.fun, env, True, path + (0,)), tgt.arg)
        if r == "pair":
            return pair(walk(d.premises[0], tgt.fst, env, True, path + (0,)),
                        walk(d.premises[1], tgt.snd, env, True, path + (1,)))
        if r == "pair_p":
            return pair_p(tgt)
        raise ShapeMismatch("unexpected rule", path, "term rule", r)

    out = walk(phi_t, target, {}, True, ())
    if pool:
        raise ShapeMismatch("argument premises left unused", (), 0, len(pool))
    return out


def antisubst(phi, t, x, u):
    """Split a derivation of ``t{x:=u}`` into (phi_t, phi_u, A)."""
    target = substitute(t, x, u)
    if not alpha_eq(phi.subject, target):
        raise ShapeMismatch("derivation does not type the substituted term", (), show(target), show(phi.subject))
    phi = align(phi, target)
    found = []

    def walk(d, s, env, active, path):
        if d.rule == "many":
            return many([walk(p, s, env, active, path + (i,)) for i, p in enumerate(d.premises)],
                        s, d.indexed)
        if not active or x not in free_vars(s):
            return align(d, s, env, path)
        if s == Var(x):
            found.append(align(d, u, {}, path))
            return ax(x, d.assigned, d.indexed)
        r, tgt = d.rule, d.subject
        if r in ("abs", "abs_p", "match"):
            inner = dict(env)
            inner.update(zip(pattern_vars(tgt.pattern), pattern_vars(s.pattern)))
            in_body = x not in pattern_vars(s.pattern)
            body = walk(d.premises[0], s.body, inner, in_body, path + (0,))
            if r == "abs_p":
                return abs_p(body, s.pattern)
            pat = align(d.premises[1], s.pattern, inner, path + (1,))
            if r == "abs":
                return abs_(body, pat)
            return match(body, pat, walk(d.premises[2], s.arg, env, True, path + (2,)))
        if r == "app":
            return app(walk(d.premises[0], s.fun, env, True, path + (0,)),
                       walk(d.premises[1], s.arg, env, True, path + (1,)))
        if r == "app_p":
            return app_p(walk(d.premises[0], s.fun, env, True, path + (0,)), s.arg)
        if r == "pair":
            return pair(walk(d.premises[0], s.fst, env, True, path + (0,)),
                        walk(d.premises[1], s.snd, env, True, path + (1,)))
        if r == "pair_p":
            return pair_p(s)
        raise ShapeMismatch("unexpected rule", path, "term rule", r)

    phi_t = walk(phi, t, {}, True, ())
    phi_u = many(found, u, phi.indexed)
    return phi_t, phi_u, phi_u.assigned


# ---------------------------------------------------------------- root cases

def _peel(d, n, path):
    """Strip n matching layers; returns (core derivation, [(pattern, arg)] outermost first)."""
    layers = []
    for _ in range(n):
        _expect(d, "match", path, "list context must be typed by match")
        layers.append((d.premises[1], d.premises[2]))
        d = d.premises[0]
        path = path + (0,)
    return d, layers


def _wrap(d, layers):
    for pat, arg in reversed(layers):
        d = match(d, pat, arg)
    return d


def reduce_root(d, kind, redex, path=()):
    """d types the prepared redex exactly; returns a derivation of its contractum."""
    kind = StepKind(kind)
    if kind is StepKind.B:
        _expect(d, "app", path, "a b-redex must be typed by app")
        fun, arg = d.premises
        n = len(decompose_list_context(redex.fun)[0])
        lam, layers = _peel(fun, n, path + (0,))
        _expect(lam, "abs", path, "the abstraction of a b-redex must be typed by abs")
        body, pat = lam.premises
        return _wrap(match(body, pat, arg), layers)
    _expect(d, "match", path, "an e- or m-redex must be typed by match")
    body, pat, arg = d.premises
    if kind is StepKind.E:
        return subst(body, redex.pattern.name, arg)
    _expect(pat, "pat_x", path + (1,), "the pattern of an m-redex must be typed by pat_x")
    if len(arg.premises) != 1:
        raise ShapeMismatch("matched argument must be typed exactly once", path + (2,), 1, len(arg.premises))
    n = len(decompose_list_context(redex.arg)[0])
    core, layers = _peel(arg.premises[0], n, path + (2, 0))
    _expect(core, "pair", path, "the pair of an m-redex must be typed by pair")
    m1, m2 = core.premises
    pi1, pi2 = pat.premises
    return _wrap(match(match(body, pi1, m1), pi2, m2), layers)


def expand_root(d, kind, redex, path=()):
    """d types the contractum of the prepared redex exactly; returns one of the redex."""
    kind = StepKind(kind)
    if kind is StepKind.B:
        n = len(decompose_list_context(redex.fun)[0])
        inner, layers = _peel(d, n, path)
        _expect(inner, "match", path, "contractum of a b-step must end in match")
        body, pat, arg = inner.premises
        return app(_wrap(abs_(body, pat), layers), arg)
    if kind is StepKind.E:
        phi_t, phi_u, a = antisubst(d, redex.body, redex.pattern.name, redex.arg)
        return match(phi_t, pat_v(redex.pattern.name, a, d.indexed), phi_u)
    layers, _ = decompose_list_context(redex.arg)

    def go(d, n, path):
        _expect(d, "match", path, "contractum of an m-step must end in match")
        if n == 0:
            inner, pi2, m2 = d.premises
            _expect(inner, "match", path + (0,), "contractum of an m-step must end in two matchings")
            body, pi1, m1 = inner.premises
            pr = pair(m1, m2)
            return match(body, pat_x(pi1, pi2), many([pr], pr.subject))
        inner, pi_q, phi_s = d.premises
        e = go(inner, n - 1, path + (0,))
        body, pi_p, arg = e.premises
        layer = match(arg.premises[0], pi_q, phi_s)
        return match(body, pi_p, many([layer], layer.subject))

    return go(d, len(layers), path)


# ---------------------------------------------------------------- positions

_PREMISE_INDEX = {
    "abs": {0: 0}, "abs_p": {0: 0},
    "app": {0: 0, 1: 1}, "app_p": {0: 0},
    "pair": {0: 0, 1: 1}, "pair_p": {},
    "match": {0: 0, 1: 2},
}


def rewrite_at(d, path, fn, _at=()):
    """Apply fn to every derivation of the subterm at ``path``.

    Positions without a premise (the argument of app_p, the inside of
    pair_p, an empty many) are left alone; callers realign subjects.
    """
    if d.rule == "many":
        return many([rewrite_at(p, path, fn, _at + (i,)) for i, p in enumerate(d.premises)],
                    d.subject, d.indexed)
    if not path:
        return fn(d, _at)
    table = _PREMISE_INDEX.get(d.rule)
    if table is None:
        raise ShapeMismatch("position does not resolve in the derivation", _at, "compound rule", d.rule)
    k = table.get(path[0])
    if k is None:
        return d
    prems = list(d.premises)
    prems[k] = rewrite_at(prems[k], path[1:], fn, _at + (k,))
    return rebuild(d, prems, d.subject)


def locate(pre_term, kind, path=None):
    kind = StepKind(kind)
    if path is None:
        r = head_redex(pre_term)
        if r is None or r[1] is not kind:
            got = None if r is None else r[1].value
            raise ShapeMismatch("step is not the head step of its pre-term", (), kind.value, got)
        return r[0], kind
    path = tuple(path)
    if root_kind(subterm_at(pre_term, path)) is not kind:
        raise ShapeMismatch("no redex of this kind at the given position", path, kind.value, None)
    return path, kind


def subject_reduce(d, pre_term, kind, path=None):
    """Carry d across one step of ``pre_term``; the head step unless ``path`` is given."""
    if not alpha_eq(d.subject, pre_term):
        raise ShapeMismatch("derivation does not type the pre-term", (), show(pre_term), show(d.subject))
    path, kind = locate(pre_term, kind, path)
    renamed, reduct = fire(kind, subterm_at(pre_term, path))
    succ = replace_at(pre_term, path, reduct)
    d = align(d, pre_term)
    out = rewrite_at(d, path, lambda sub, at: reduce_root(align(sub, renamed, {}, at), kind, renamed, at))
    return align(out, succ)


def subject_expand(d, pre_term, kind, path=None):
    """Derivation of ``pre_term`` from one of its successor by the given step."""
    path, kind = locate(pre_term, kind, path)
    renamed, reduct = fire(kind, subterm_at(pre_term, path))
    succ = replace_at(pre_term, path, reduct)
    if not alpha_eq(d.subject, succ):
        raise ShapeMismatch("derivation does not type the successor", (), show(succ), show(d.subject))
    d = align(d, succ)
    out = rewrite_at(d, path, lambda sub, at: expand_root(align(sub, reduct, {}, at), kind, renamed, at))
    return align(out, pre_term)
