"""Rule checker for both systems.

``system`` is ``"u"`` (no indices, base ``*`` only) or ``"e"`` (indices
everywhere, tight bases only). The first failing node in pre-order is
reported with its path.
"""
from __future__ import annotations

from .derivation import PATTERN_RULES, RULES
from .errors import RuleViolation
from .syntax import (
    PATTERN_TYPES, TERM_TYPES, Abs, App, Match, PPair, PVar, Pair, Var,
    alpha_eq, pattern_vars,
)
from .types import (
    EMPTY_CONTEXT, STAR, STAR_M, STAR_N, Arrow, Multiset, Product, TIGHT_M, TIGHT_N,
    TypingContext, bases, context_meet, is_tight, mset, show_context,
)

_SYSTEM_RULES = {
    "u": {"ax", "many", "abs", "app", "pair", "match", "pat_v", "pat_x"},
    "e": set(RULES),
}
_FORBIDDEN_BASES = {"u": {STAR_N, STAR_M}, "e": {STAR}}


def check(d, system, pair_e_reading="sum"):
    if system not in ("u", "e"):
        raise ValueError(f"unknown system {system!r}")
    _check(d, system, pair_e_reading, ())


def _check(d, system, reading, path):
    def fail(reason):
        raise RuleViolation(path, f"{d.rule}: {reason}")

    j = d.conclusion
    if d.rule not in _SYSTEM_RULES[system]:
        fail("rule not available in this system")
    is_pat = d.rule in PATTERN_RULES
    if is_pat and not isinstance(j.subject, PATTERN_TYPES):
        fail("pattern rule with a term subject")
    if not is_pat and not isinstance(j.subject, TERM_TYPES):
        fail("term rule with a pattern subject")
    if (is_pat or d.rule == "many") != isinstance(j.assigned, Multiset):
        fail("multiset types are assigned exactly by many and pattern rules")
    bad = (bases(j.assigned) | bases(j.context)) & _FORBIDDEN_BASES[system]
    if bad:
        fail(f"base type {sorted(bad)[0]} is not allowed in system {system.upper()}")
    if system == "u":
        if j.indices is not None:
            fail("indices are not used in system U")
    else:
        want = 3 if is_pat else 4
        if j.indices is None or len(j.indices) != want or any(
                not isinstance(i, int) or i < 0 for i in j.indices):
            fail(f"expected {want} non-negative indices, got {j.indices}")

    prem = d.premises
    arity = {"ax": 0, "pair_p": 0, "pat_v": 0, "pat_p": 0, "abs_p": 1, "app_p": 1,
             "abs": 2, "app": 2, "pair": 2, "pat_x": 2, "match": 3}
    if d.rule in arity and len(prem) != arity[d.rule]:
        fail(f"expected {arity[d.rule]} premises, got {len(prem)}")

    def idx_eq(expected):
        if system == "e" and tuple(j.indices) != tuple(expected):
            fail(f"indices {tuple(j.indices)} should be {tuple(expected)}")

    def ctx_eq(expected, what="context"):
        if j.context != expected:
            fail(f"{what} {show_context(j.context)} should be {show_context(expected)}")

    def need(cond, reason):
        if not cond:
            fail(reason)

    def is_term_prem(p, kind=None):
        return p.rule not in PATTERN_RULES and (kind is None or (p.rule == "many") == (kind == "many"))

    s = j.subject
    r = d.rule
    if r == "ax":
        need(isinstance(s, Var), "subject must be a variable")
        ctx_eq(TypingContext({s.name: mset(j.assigned)}))
        idx_eq((0, 0, 0, 0))
    elif r == "many":
        for i, p in enumerate(prem):
            need(is_term_prem(p, "simple"), f"premise {i} must assign a simple type")
            need(alpha_eq(p.subject, s), f"premise {i} types another term")
        ctx_eq(context_meet([p.context for p in prem]))
        need(j.assigned == Multiset(tuple(p.assigned for p in prem)), "multiset is not the premise types")
        if system == "e":
            idx_eq(tuple(sum(p.indices[k] for p in prem) for k in range(4)))
    elif r in ("abs", "abs_p"):
        need(isinstance(s, Abs), "subject must be an abstraction")
        body = prem[0]
        need(is_term_prem(body, "simple") and body.subject == s.body, "first premise must type the body")
        vs = pattern_vars(s.pattern)
        ctx_eq(body.context.erase(vs))
        if r == "abs":
            pat = prem[1]
            need(pat.rule in PATTERN_RULES and pat.subject == s.pattern, "second premise must type the pattern")
            need(pat.context == body.context.restrict(vs), "pattern context must be the body context restricted to the pattern")
            need(j.assigned == Arrow(pat.assigned, body.assigned), "type must be pattern type -> body type")
            if system == "e":
                b, e, m, f = body.indices
                ep, mp, fp = pat.indices
                idx_eq((b + 1, e + ep, m + mp, f + fp))
        else:
            need(is_tight(body.assigned), "body type must be tight")
            need(is_tight(body.context.restrict(vs)), "pattern variables must be typed tightly")
            need(j.assigned == TIGHT_M, "type must be *M")
            b, e, m, f = body.indices
            idx_eq((b, e, m, f + 1))
    elif r in ("app", "app_p"):
        need(isinstance(s, App), "subject must be an application")
        fun = prem[0]
        need(is_term_prem(fun, "simple") and fun.subject == s.fun, "first premise must type the function")
        if r == "app":
            arg = prem[1]
            need(arg.rule == "many" and alpha_eq(arg.subject, s.arg), "second premise must be a many node for the argument")
            need(isinstance(fun.assigned, Arrow), "function type must be an arrow")
            need(fun.assigned.domain == arg.assigned, "argument multiset must match the arrow domain")
            need(j.assigned == fun.assigned.codomain, "type must be the arrow codomain")
            ctx_eq(context_meet([fun.context, arg.context]))
            if system == "e":
                idx_eq(tuple(a + b for a, b in zip(fun.indices, arg.indices)))
        else:
            need(fun.assigned == TIGHT_N, "function must be typed *N")
            need(j.assigned == TIGHT_N, "type must be *N")
            ctx_eq(fun.context)
            b, e, m, f = fun.indices
            idx_eq((b, e, m, f + 1))
    elif r in ("pair", "pair_p"):
        need(isinstance(s, Pair), "subject must be a pair")
        if r == "pair":
            left, right = prem
            need(left.rule == "many" and alpha_eq(left.subject, s.fst), "first premise must be a many node for the first component")
            need(right.rule == "many" and alpha_eq(right.subject, s.snd), "second premise must be a many node for the second component")
            need(j.assigned == Product(left.assigned, right.assigned), "type must be the product of the premise multisets")
            ctx_eq(context_meet([left.context, right.context]))
            if system == "e":
                li, ri = left.indices, right.indices
                e_idx = li[1] + (ri[0] if reading == "paper" else ri[1])
                idx_eq((li[0] + ri[0], e_idx, li[2] + ri[2], li[3] + ri[3]))
        else:
            ctx_eq(EMPTY_CONTEXT)
            need(j.assigned == TIGHT_M, "type must be *M")
            idx_eq((0, 0, 0, 1))
    elif r == "match":
        need(isinstance(s, Match), "subject must be a matching")
        body, pat, arg = prem
        need(is_term_prem(body, "simple") and body.subject == s.body, "first premise must type the body")
        need(pat.rule in PATTERN_RULES and pat.subject == s.pattern, "second premise must type the pattern")
        need(arg.rule == "many" and alpha_eq(arg.subject, s.arg), "third premise must be a many node for the argument")
        vs = pattern_vars(s.pattern)
        need(pat.context == body.context.restrict(vs), "pattern context must be the body context restricted to the pattern")
        need(pat.assigned == arg.assigned, "argument multiset must match the pattern type")
        need(j.assigned == body.assigned, "type must be the body type")
        ctx_eq(context_meet([body.context.erase(vs), arg.context]))
        if system == "e":
            bt, et, mt, ft = body.indices
            bu, eu, mu, fu = arg.indices
            ep, mp, fp = pat.indices
            idx_eq((bt + bu, et + eu + ep, mt + mu + mp, ft + fu + fp))
    elif r == "pat_v":
        need(isinstance(s, PVar), "subject must be a variable pattern")
        ctx_eq(TypingContext({s.name: j.assigned}))
        idx_eq((1, 0, 0))
    elif r == "pat_x":
        need(isinstance(s, PPair), "subject must be a pair pattern")
        left, right = prem
        need(left.rule in PATTERN_RULES and left.subject == s.left, "first premise must type the left pattern")
        need(right.rule in PATTERN_RULES and right.subject == s.right, "second premise must type the right pattern")
        need(not set(pattern_vars(s.left)) & set(pattern_vars(s.right)), "sub-patterns share a variable")
        need(not left.context.domain() & right.context.domain(), "sub-pattern contexts overlap")
        need(j.assigned == mset(Product(left.assigned, right.assigned)), "type must be a singleton product of the premise types")
        ctx_eq(context_meet([left.context, right.context]))
        if system == "e":
            el, ml, fl = left.indices
            er, mr, fr = right.indices
            idx_eq((el + er, 1 + ml + mr, fl + fr))
    elif r == "pat_p":
        need(isinstance(s, PPair), "subject must be a pair pattern")
        need(j.context.domain() <= set(pattern_vars(s)), "context mentions variables outside the pattern")
        need(is_tight(j.context), "context must be tight")
        need(j.assigned == mset(TIGHT_N), "type must be [*N]")
        idx_eq((0, 0, 1))
    else:  # pragma: no cover - guarded by _SYSTEM_RULES
        fail("unknown rule")

    for i, p in enumerate(prem):
        _check(p, system, reading, path + (i,))
