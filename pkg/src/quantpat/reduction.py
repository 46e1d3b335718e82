"""Rewriting: the three distance rules, the head strategy and canonical forms.

A rule fires in two stages. :func:`prepare` alpha-renames the redex so
that no side condition on bound names can fail, and :func:`contract`
then builds the reduct without any further renaming. The derivation
transformers rely on this split: they align a derivation to the
prepared redex and rebuild it structurally.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from .errors import BudgetExceeded, NotCanonical, ParseError
from .syntax import (
    Abs, App, Match, PPair, PVar, Pair, Var,
    alpha_key, all_names, children, free_vars, parse, pattern_vars,
    rename_binder, replace_at, show, subterm_at,
)


class StepKind(str, enum.Enum):
    B = "b"
    E = "e"
    M = "m"

    def __str__(self):
        return self.value


class Classification(str, enum.Enum):
    PURE_CANONICAL = "PureCanonical"
    CANONICAL = "Canonical"
    HEAD_REDUCIBLE = "HeadReducible"
    HEAD_CLASH = "HeadClash"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Counters:
    b: int = 0
    e: int = 0
    m: int = 0
    f: int = 0

    def as_tuple(self):
        return (self.b, self.e, self.m, self.f)

    def __str__(self):
        return f"{self.b} {self.e} {self.m} {self.f}"


@dataclass(frozen=True)
class Step:
    pre_term: object
    kind: StepKind


@dataclass(frozen=True)
class Trace:
    steps: tuple = ()
    final: object = None

    def counters(self):
        b = sum(1 for s in self.steps if s.kind is StepKind.B)
        e = sum(1 for s in self.steps if s.kind is StepKind.E)
        m = sum(1 for s in self.steps if s.kind is StepKind.M)
        return Counters(b, e, m, 0)

    def terms(self):
        """Every term of the run, initial to final."""
        return [s.pre_term for s in self.steps] + [self.final]


@dataclass(frozen=True)
class Redex:
    path: tuple
    kind: StepKind
    result: object = field(compare=False)


# ---------------------------------------------------------------- list contexts

def decompose_list_context(t):
    """Split ``t`` as ``L<core>``; layers are listed innermost first."""
    layers = []
    while isinstance(t, Match):
        layers.append((t.pattern, t.arg))
        t = t.body
    layers.reverse()
    return layers, t


def plug(layers, core):
    for p, u in layers:
        core = Match(core, p, u)
    return core


def list_core(t):
    while isinstance(t, Match):
        t = t.body
    return t


def _rename_list_binders(t, clash, taken):
    """Rename binders of the matching stack around the core of t."""
    if not isinstance(t, Match):
        return t
    p, body = rename_binder(t.pattern, t.body, clash, taken)
    return Match(_rename_list_binders(body, clash, taken), p, t.arg)


# ---------------------------------------------------------------- root rules

def root_kind(t):
    """Kind of the rule whose left-hand side matches t at the root, if any."""
    if isinstance(t, App) and isinstance(list_core(t.fun), Abs):
        return StepKind.B
    if isinstance(t, Match):
        if isinstance(t.pattern, PVar):
            return StepKind.E
        if isinstance(list_core(t.arg), Pair):
            return StepKind.M
    return None


def prepare(kind, t):
    """Alpha-variant of the redex t on which :func:`contract` needs no renaming."""
    kind = StepKind(kind)
    taken = set(all_names(t))
    if kind is StepKind.B:
        return App(_rename_list_binders(t.fun, free_vars(t.arg), taken), t.arg)
    if kind is StepKind.M:
        pattern, body = t.pattern, t.body
        layers, pair = decompose_list_context(t.arg)
        # p2 will scope over u1 after the step
        right, body2 = rename_binder(pattern.right, body, free_vars(pair.fst), taken)
        pattern = PPair(pattern.left, right)
        outside = free_vars(body2) - frozenset(pattern_vars(pattern))
        arg = _rename_list_binders(t.arg, outside, taken)
        return Match(body2, pattern, arg)
    return t


def contract(kind, t):
    kind = StepKind(kind)
    if kind is StepKind.B:
        layers, lam = decompose_list_context(t.fun)
        return plug(layers, Match(lam.body, lam.pattern, t.arg))
    if kind is StepKind.M:
        layers, pair = decompose_list_context(t.arg)
        inner = Match(Match(t.body, t.pattern.left, pair.fst), t.pattern.right, pair.snd)
        return plug(layers, inner)
    return substitute(t.body, t.pattern.name, t.arg)


def fire(kind, t):
    """Returns (prepared redex, reduct)."""
    s = prepare(kind, t)
    return s, contract(kind, s)


# ---------------------------------------------------------------- substitution

def substitute(t, x, u):
    """Capture-avoiding ``t{x:=u}``; u is inserted verbatim."""
    fvu = free_vars(u)
    taken = set(all_names(t)) | set(all_names(u)) | {x}

    def go(s):
        if isinstance(s, Var):
            return u if s.name == x else s
        if x not in free_vars(s):
            return s
        if isinstance(s, Abs):
            p, b = rename_binder(s.pattern, s.body, fvu, taken)
            return Abs(p, go(b))
        if isinstance(s, Pair):
            return Pair(go(s.fst), go(s.snd))
        if isinstance(s, App):
            return App(go(s.fun), go(s.arg))
        arg = go(s.arg)
        if x in pattern_vars(s.pattern) or x not in free_vars(s.body):
            return Match(s.body, s.pattern, arg)
        p, b = rename_binder(s.pattern, s.body, fvu, taken)
        return Match(go(b), p, arg)

    return go(t)


# ---------------------------------------------------------------- head strategy

def head_redex(t):
    """(path, kind) of the head redex of t, or None when t is head-normal."""
    if isinstance(t, Abs):
        r = head_redex(t.body)
        return None if r is None else ((0,) + r[0], r[1])
    if isinstance(t, App):
        if isinstance(list_core(t.fun), Abs):
            return ((), StepKind.B)
        r = head_redex(t.fun)
        return None if r is None else ((0,) + r[0], r[1])
    if isinstance(t, Match):
        r = head_redex(t.body)
        if r is not None:
            return ((0,) + r[0], r[1])
        if isinstance(t.pattern, PVar):
            return ((), StepKind.E)
        if isinstance(list_core(t.arg), Pair):
            return ((), StepKind.M)
        r = head_redex(t.arg)
        return None if r is None else ((1,) + r[0], r[1])
    return None


def step_at(t, path, kind):
    sub = subterm_at(t, path)
    if root_kind(sub) is not StepKind(kind):
        raise ValueError(f"no {kind}-redex at {list(path)} in {show(t)}")
    return replace_at(t, path, fire(kind, sub)[1])


def head_step(t):
    r = head_redex(t)
    if r is None:
        return None
    path, kind = r
    return step_at(t, path, kind), kind


def head_normalize(t, max_steps=10000):
    """Run the head strategy. Returns (Trace, Counters with f = 0)."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    steps = []
    while True:
        r = head_step(t)
        if r is None:
            trace = Trace(tuple(steps), t)
            return trace, trace.counters()
        if len(steps) >= max_steps:
            raise BudgetExceeded(Trace(tuple(steps), t))
        steps.append(Step(t, r[1]))
        t = r[0]


def head_rule_instances(t, literal=False):
    """Every way a rule of the head strategy applies to t, as (rule, path).

    This is an exhaustive enumeration (nothing short-circuits), used to
    check determinism. With ``literal=True`` reduction inside a matching
    argument is allowed even when the argument already is a pair inside
    a list context.
    """
    out = []

    def go(s, path):
        if isinstance(s, Abs):
            go(s.body, path + (0,))
        elif isinstance(s, App):
            if isinstance(list_core(s.fun), Abs):
                out.append(("b", path))
            else:
                go(s.fun, path + (0,))
        elif isinstance(s, Match):
            before = len(out)
            go(s.body, path + (0,))
            body_normal = len(out) == before
            if not body_normal:
                return
            if isinstance(s.pattern, PVar):
                out.append(("e", path))
                return
            is_pair = isinstance(list_core(s.arg), Pair)
            if is_pair:
                out.append(("m", path))
            if literal or not is_pair:
                go(s.arg, path + (1,))

    go(t, ())
    return out


# ---------------------------------------------------------------- full reduction

def full_steps(t):
    """Every redex of the full relation, leftmost-outermost, with its reduct."""
    out = []

    def go(s, path):
        kind = root_kind(s)
        if kind is not None:
            out.append(Redex(path, kind, replace_at(t, path, fire(kind, s)[1])))
        for i, c in enumerate(children(s)):
            go(c, path + (i,))

    go(t, ())
    return out


def joinability_probe(t, budget, cap=2000):
    """Reduce the first and last redex of t, then search for a common reduct."""
    redexes = full_steps(t)
    if len(redexes) < 2:
        return True

    def reachable(start):
        seen = {alpha_key(start)}
        frontier = deque([(start, 0)])
        while frontier and len(seen) < cap:
            s, d = frontier.popleft()
            if d >= budget:
                continue
            for r in full_steps(s):
                k = alpha_key(r.result)
                if k not in seen:
                    seen.add(k)
                    frontier.append((r.result, d + 1))
        return seen

    left = reachable(redexes[0].result)
    right = reachable(redexes[-1].result)
    return not left.isdisjoint(right)


# ---------------------------------------------------------------- canonical forms

def in_pure_canonical(t):
    if isinstance(t, Var):
        return True
    if isinstance(t, App):
        return in_pure_canonical(t.fun)
    if isinstance(t, Match):
        return isinstance(t.pattern, PPair) and in_pure_canonical(t.body) and in_pure_canonical(t.arg)
    return False


def in_canonical(t):
    if isinstance(t, Abs):
        return in_canonical(t.body)
    if isinstance(t, Pair):
        return True
    if isinstance(t, Match) and isinstance(t.pattern, PPair):
        if in_canonical(t.body) and in_pure_canonical(t.arg):
            return True
    return in_pure_canonical(t)


def has_head_clash(t):
    """Structural head-clash detector, independent of the head strategy."""
    if isinstance(t, Abs):
        return has_head_clash(t.body)
    if isinstance(t, App):
        core = list_core(t.fun)
        if isinstance(core, Pair):
            return True
        if isinstance(core, Abs):
            return isinstance(core.pattern, PPair) and isinstance(list_core(t.arg), Abs)
        return has_head_clash(t.fun)
    if isinstance(t, Match):
        if has_head_clash(t.body):
            return True
        if isinstance(t.pattern, PVar):
            return False
        core = list_core(t.arg)
        if isinstance(core, Abs):
            return True
        if isinstance(core, Pair):
            return False
        return has_head_clash(t.arg)
    return False


def classify(t):
    if in_pure_canonical(t):
        return Classification.PURE_CANONICAL
    if in_canonical(t):
        return Classification.CANONICAL
    if head_redex(t) is None:
        return Classification.HEAD_CLASH
    return Classification.HEAD_REDUCIBLE


def is_canonical(t):
    return in_canonical(t)


def canonical_size(t):
    if not in_canonical(t):
        raise NotCanonical(f"not a canonical form: {show(t)}")
    return _size(t)


def _size(t):
    if isinstance(t, Var):
        return 0
    if isinstance(t, Pair):
        return 1
    if isinstance(t, App):
        return _size(t.fun) + 1
    if isinstance(t, Abs):
        return _size(t.body) + 1
    return _size(t.body) + _size(t.arg) + 1


# ---------------------------------------------------------------- trace text

def format_trace(trace, counters=None):
    lines = [f"{s.kind} {show(s.pre_term)}" for s in trace.steps]
    lines.append(f"FINAL {show(trace.final)}")
    c = counters or trace.counters()
    lines.append(f"COUNTERS {c.b} {c.e} {c.m}")
    return "\n".join(lines) + "\n"


def parse_trace(text):
    steps, final, counters = [], None, None
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        head, _, rest = line.partition(" ")
        if head in ("b", "e", "m"):
            steps.append(Step(parse(rest), StepKind(head)))
        elif head == "FINAL":
            final = parse(rest)
        elif head == "COUNTERS":
            b, e, m = (int(x) for x in rest.split())
            counters = Counters(b, e, m, 0)
        else:
            raise ParseError(f"bad trace line {n}: {line!r}")
    if final is None:
        raise ParseError("trace has no FINAL line")
    trace = Trace(tuple(steps), final)
    if counters is not None and counters != trace.counters():
        raise ParseError("COUNTERS line disagrees with the recorded steps")
    return trace
