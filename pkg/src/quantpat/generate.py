"""Seeded term generation, shrinking and the invariant suite used by fuzzing."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from . import transform
from .derivation import PATTERN_RULES, deriv_size, nodes, pair_e_reading
from .errors import BudgetExceeded, NotHeadNormalizing
from .reduction import (
    Classification, StepKind, classify, has_head_clash, head_normalize,
    head_redex, head_rule_instances, in_canonical,
)
from .syntax import (
    Abs, App, Match, PPair, PVar, Pair, Var, children, free_vars, replace_at, show, subterm_at,
    term_size,
)
from .system_e import (
    check_e, forward_replay_check, relevance_holds, synthesize_tight, tight_spreading_holds,
    verify_exact,
)
from .system_u import check_u, subject_reduce_u, synthesize_u

FREE_POOL = ("a", "b", "c")
BOUND_NAMES = ("x", "y", "z", "w", "u", "v")
ABS_HEAD_BIAS = 0.3

PROPERTIES = (
    "determinism", "classify", "exact", "replay_e", "upper_bound", "replay_u",
    "relevance", "clash_free", "tight_spreading", "subst_laws", "round_trip", "divergence",
)


# ---------------------------------------------------------------- generation

class TermGenerator:
    """Grammar-directed generator with a decreasing size budget.

    Patterns are linear by construction and at most two levels deep.
    """

    def __init__(self, seed, size=12):
        if size < 1:
            raise ValueError("size bound must be at least 1")
        self.rng = random.Random(seed)
        self.size = size

    def term(self):
        return self._term(self.rng.randint(1, self.size), ())

    def _pattern(self, depth=0):
        names = list(BOUND_NAMES)
        self.rng.shuffle(names)

        def go(d):
            if d < 2 and self.rng.random() < 0.4:
                return PPair(go(d + 1), go(d + 1))
            return PVar(names.pop())

        return go(depth)

    def _var(self, scope):
        return Var(self.rng.choice(tuple(scope) + FREE_POOL))

    def _abs(self, n, scope):
        p = self._pattern()
        return Abs(p, self._term(n - 1, scope + _names(p)))

    def _term(self, n, scope):
        rng = self.rng
        if n <= 1:
            return self._var(scope)
        if n == 2:
            return self._abs(n, scope) if rng.random() < 0.7 else self._var(scope)
        kind = rng.choice(("abs", "pair", "app", "app", "match"))
        if kind == "abs":
            return self._abs(n, scope)
        k = rng.randint(1, n - 2)
        if kind == "pair":
            return Pair(self._term(k, scope), self._term(n - 1 - k, scope))
        if kind == "app":
            head = k >= 2 and rng.random() < ABS_HEAD_BIAS
            fun = self._abs(k, scope) if head else self._term(k, scope)
            return App(fun, self._term(n - 1 - k, scope))
        p = self._pattern()
        return Match(self._term(k, scope + _names(p)), p, self._term(n - 1 - k, scope))

    def terms(self, count):
        return [self.term() for _ in range(count)]


def _names(p):
    if isinstance(p, PVar):
        return (p.name,)
    return _names(p.left) + _names(p.right)


# ---------------------------------------------------------------- shrinking

def _positions(t, path=()):
    yield path
    for i, c in enumerate(children(t)):
        yield from _positions(c, path + (i,))


def shrink_candidates(t):
    """Structurally smaller variants: fresh variables, hoisted children, dropped matchings."""
    fresh = Var(FREE_POOL[0])
    for path in _positions(t):
        sub = subterm_at(t, path)
        if not isinstance(sub, Var):
            yield replace_at(t, path, fresh)
        for c in children(sub):
            if free_vars(c) <= free_vars(sub) | set(FREE_POOL):
                yield replace_at(t, path, c)
        if isinstance(sub, Match):
            yield replace_at(t, path, sub.body)


def shrink(t, fails, limit=500):
    """Greedy shrinking: keep the first smaller candidate that still fails."""
    tries = 0
    improved = True
    while improved and tries < limit:
        improved = False
        for cand in shrink_candidates(t):
            tries += 1
            if term_size(cand) < term_size(t) and fails(cand):
                t, improved = cand, True
                break
            if tries >= limit:
                break
    return t


# ---------------------------------------------------------------- invariants

@dataclass
class TermReport:
    term: object
    outcome: str  # normalizing | diverging | clashing
    passed: list = field(default_factory=list)
    failed: list = field(default_factory=list)
    detail: str = ""


def _sub_at(d, path):
    found = []

    def grab(sub, at):
        found.append(sub)
        return sub

    transform.rewrite_at(d, path, grab)
    return found


def _check_subst_laws(phi, path):
    """Split each derivation of an e-redex, recombine, and compare size and indices."""
    for sub in _sub_at(phi, path):
        body, pat, arg = sub.premises
        x = pat.subject.name
        a = pat.assigned
        out = transform.subst(body, x, arg)
        if out.context != body.context.erase([x]).meet(arg.context):
            return False
        if deriv_size(out) != deriv_size(body) + deriv_size(arg) - len(a):
            return False
        if out.indexed and tuple(out.indices) != tuple(b + u for b, u in zip(body.indices, arg.indices)):
            return False
        t_body, u = sub.subject.body, sub.subject.arg
        phi_t, phi_u, a2 = transform.antisubst(out, t_body, x, u)
        if a2 != a or deriv_size(out) != deriv_size(phi_t) + deriv_size(phi_u) - len(a2):
            return False
        if out.indexed and tuple(out.indices) != tuple(p + q for p, q in zip(phi_t.indices, phi_u.indices)):
            return False
    return True


def _clash_free(d):
    for _, n in nodes(d):
        if n.rule in PATTERN_RULES or n.rule == "many":
            continue
        if has_head_clash(n.subject):
            return False
    return True


def _same_root(a, b):
    return a.context == b.context and a.assigned == b.assigned and a.indices == b.indices


def run_invariants(t, max_steps=200, reading="sum"):
    """Run every property on t; returns a TermReport."""
    results = {}

    def record(name, ok):
        results[name] = results.get(name, True) and bool(ok)

    rep = TermReport(t, "normalizing")
    record("determinism", len(head_rule_instances(t)) <= 1)
    canonical = classify(t) in (Classification.PURE_CANONICAL, Classification.CANONICAL)
    record("classify", canonical == in_canonical(t) == (head_redex(t) is None and not has_head_clash(t)))

    try:
        trace, counters = head_normalize(t, max_steps)
    except BudgetExceeded:
        rep.outcome = "diverging"
        trace = None
    if trace is not None and not in_canonical(trace.final):
        rep.outcome = "clashing"
    if rep.outcome != "normalizing":
        try:
            synthesize_tight(t, max_steps)
            record("divergence", False)
        except NotHeadNormalizing:
            record("divergence", True)
        rep.passed = sorted(k for k, v in results.items() if v)
        rep.failed = sorted(k for k, v in results.items() if not v)
        return rep

    with pair_e_reading(reading):
        try:
            report = verify_exact(t, max_steps, reading)
            record("exact", report.match)
            if not report.match:
                rep.detail = f"exact: {report.summary()}"
            phi_e = report.derivation
            check_e(phi_e, reading)
        except Exception as exc:
            record("exact", False)
            rep.detail = f"exact: {exc}"
            phi_e = None

        if phi_e is not None:
            try:
                forward_replay_check(phi_e, trace)
                record("replay_e", True)
            except Exception as exc:
                record("replay_e", False)
                rep.detail = rep.detail or f"replay_e: {exc}"

    try:
        phi_u = synthesize_u(t, max_steps)
        check_u(phi_u)
        k = counters.b + counters.e + counters.m
        record("upper_bound", k <= deriv_size(phi_u))
    except Exception as exc:
        record("upper_bound", False)
        rep.detail = rep.detail or f"upper_bound: {exc}"
        phi_u = None

    derivs = [d for d in (phi_u, phi_e) if d is not None]
    for d in derivs:
        record("relevance", relevance_holds(d))
        record("clash_free", _clash_free(d))
    if phi_e is not None:
        record("tight_spreading", tight_spreading_holds(phi_e))

    # walk the trace once in each system: size decrease, lemma laws, round trips
    try:
        with pair_e_reading(reading):
            cur_u, cur_e = phi_u, phi_e
            for step in trace.steps:
                path = head_redex(step.pre_term)[0]
                for cur in (cur_u, cur_e):
                    if cur is None:
                        continue
                    if step.kind is StepKind.E:
                        record("subst_laws", _check_subst_laws(cur, path))
                    nxt = transform.subject_reduce(cur, step.pre_term, step.kind)
                    back = transform.subject_expand(nxt, step.pre_term, step.kind)
                    record("round_trip", _same_root(back, cur))
                if cur_u is not None:
                    nxt_u = subject_reduce_u(cur_u, step)
                    record("replay_u", deriv_size(nxt_u) < deriv_size(cur_u))
                    cur_u = nxt_u
                if cur_e is not None:
                    cur_e = transform.subject_reduce(cur_e, step.pre_term, step.kind)
            if not trace.steps:
                record("replay_u", True)
                record("round_trip", True)
                record("subst_laws", True)
    except Exception as exc:
        record("round_trip", False)
        rep.detail = rep.detail or f"trace walk: {exc}"

    rep.passed = sorted(k for k, v in results.items() if v)
    rep.failed = sorted(k for k, v in results.items() if not v)
    return rep


@dataclass
class FuzzSummary:
    total: int = 0
    outcomes: Counter = field(default_factory=Counter)
    passes: Counter = field(default_factory=Counter)
    failure: object = None  # (TermReport, minimized term)

    def lines(self):
        out = [f"terms {self.total}"]
        for k in ("normalizing", "diverging", "clashing"):
            out.append(f"{k} {self.outcomes[k]}")
        for p in PROPERTIES:
            out.append(f"pass {p} {self.passes[p]}")
        if self.failure is not None:
            rep, small = self.failure
            out.append(f"FAIL {','.join(rep.failed)} {show(rep.term)}")
            if rep.detail:
                out.append(f"DETAIL {rep.detail}")
            out.append(f"MINIMIZED {show(small)}")
        return out


def fuzz(seed=42, count=500, size=12, max_steps=200, reading="sum", extra=()):
    """Run the invariant suite over ``extra`` terms then ``count`` generated ones.

    Stops at the first failing term and shrinks it.
    """
    gen = TermGenerator(seed, size)
    corpus = list(extra) + gen.terms(count)
    summary = FuzzSummary()
    for t in corpus:
        rep = run_invariants(t, max_steps, reading)
        summary.total += 1
        summary.outcomes[rep.outcome] += 1
        summary.passes.update(rep.passed)
        if rep.failed:
            wanted = set(rep.failed)
            small = shrink(t, lambda c: bool(wanted & set(run_invariants(c, max_steps, reading).failed)))
            summary.failure = (rep, small)
            break
    return summary
