"""System E: exact counters.

A tight derivation with indices (b, e, m, f) witnesses a head run with
exactly b, e and m steps of each kind, ending in a canonical form of
size f. Synthesis builds such a derivation for the normal form and
expands it backwards along the observed trace.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import transform
from .check import check
from .derivation import (
    PATTERN_RULES, abs_p, app_p, ax, current_pair_e_reading, many, match, nodes, pair_e_reading,
    pair_p, pat_p,
)
from .errors import BudgetExceeded, NotCanonical, NotHeadNormalizing, ReplayMismatch
from .reduction import (
    Counters, Step, StepKind, canonical_size, head_normalize, in_canonical, in_pure_canonical,
)
from .syntax import Abs, App, Pair, Var, alpha_eq, free_vars, pattern_vars, show
from .types import TIGHT_N, is_tight

_KIND_INDEX = {StepKind.B: 0, StepKind.E: 1, StepKind.M: 2}


@dataclass(frozen=True)
class TightReport:
    synthesized: Counters
    observed: Counters
    derivation: object = None

    @property
    def match(self):
        return self.synthesized == self.observed

    def summary(self):
        yes = "yes" if self.match else "no"
        return f"SYNTH {self.synthesized} | OBS {self.observed} | MATCH {yes}"


def check_e(d, reading=None):
    """Raise RuleViolation at the first node that breaks a rule of System E.

    ``reading`` selects the e-index of the pair rule; by default the one
    currently in force (see :func:`pair_e_reading`).
    """
    check(d, "e", reading or current_pair_e_reading())


def is_valid_e(d, reading=None):
    try:
        check_e(d, reading)
    except Exception:
        return False
    return True


def is_tight_derivation(d):
    return is_tight(d.context) and is_tight(d.assigned)


def root_counters(d):
    return Counters(*d.indices)


def subst_e(phi_t, x, phi_u):
    return transform.subst(phi_t, x, phi_u)


def antisubst_e(phi, t, x, u):
    return transform.antisubst(phi, t, x, u)


def _step(step):
    if isinstance(step, Step):
        return step.pre_term, step.kind
    pre, kind = step
    return pre, StepKind(kind)


def subject_reduce_e(phi, step):
    pre, kind = _step(step)
    return transform.subject_reduce(phi, pre, kind)


def subject_expand_e(phi_after, step):
    pre, kind = _step(step)
    return transform.subject_expand(phi_after, pre, kind)


# ---------------------------------------------------------------- canonical forms

def _neutral(t):
    """Derivation of a pure canonical form at *N."""
    if isinstance(t, Var):
        return ax(t.name, TIGHT_N, indexed=True)
    if isinstance(t, App):
        return app_p(_neutral(t.fun), t.arg)
    return _blocked(t, _neutral(t.body))


def _blocked(t, body):
    pat = pat_p(t.pattern, body.context.restrict(pattern_vars(t.pattern)))
    return match(body, pat, many([_neutral(t.arg)], t.arg))


def _canonical(t):
    if isinstance(t, Pair):
        return pair_p(t)
    if isinstance(t, Abs):
        return abs_p(_canonical(t.body), t.pattern)
    if in_pure_canonical(t):
        return _neutral(t)
    return _blocked(t, _canonical(t.body))


def tight_type_canonical(t):
    """Tight derivation of a canonical form with indices (0, 0, 0, |t|)."""
    if not in_canonical(t):
        raise NotCanonical(f"not a canonical form: {show(t)}")
    return _canonical(t)


def synthesize_tight(t, max_steps=10000, pair_reading=None):
    """Tight derivation of t whose indices are its exact head-run counters."""
    reading = pair_reading or current_pair_e_reading()
    try:
        trace, _ = head_normalize(t, max_steps)
    except BudgetExceeded as exc:
        raise NotHeadNormalizing(f"no head normal form within {max_steps} steps", exc.trace) from exc
    if not in_canonical(trace.final):
        raise NotHeadNormalizing(f"head normal form {show(trace.final)} contains a clash", trace)
    with pair_e_reading(reading):
        phi = tight_type_canonical(trace.final)
        for step in reversed(trace.steps):
            phi = subject_expand_e(phi, step)
    return phi


def verify_exact(t, max_steps=10000, pair_reading=None):
    try:
        trace, counters = head_normalize(t, max_steps)
    except BudgetExceeded as exc:
        raise NotHeadNormalizing(f"no head normal form within {max_steps} steps", exc.trace) from exc
    if not in_canonical(trace.final):
        raise NotHeadNormalizing(f"head normal form {show(trace.final)} contains a clash", trace)
    observed = Counters(counters.b, counters.e, counters.m, canonical_size(trace.final))
    phi = synthesize_tight(t, max_steps, pair_reading)
    return TightReport(root_counters(phi), observed, phi)


def forward_replay_check(phi, trace):
    """Replay subject reduction along the trace, checking every counter move.

    Returns the final derivation; raises ReplayMismatch naming the step.
    """
    if not alpha_eq(phi.subject, trace.steps[0].pre_term if trace.steps else trace.final):
        raise ReplayMismatch(0, "derivation does not type the initial term")
    for i, step in enumerate(trace.steps):
        before = phi.indices
        try:
            phi = subject_reduce_e(phi, step)
            check_e(phi)
        except Exception as exc:  # any failure is a mismatch at this step
            raise ReplayMismatch(i, str(exc)) from exc
        want = list(before)
        want[_KIND_INDEX[step.kind]] -= 1
        if tuple(phi.indices) != tuple(want):
            raise ReplayMismatch(i, f"indices {phi.indices} after a {step.kind}-step from {before}")
    b, e, m, f = phi.indices
    if (b, e, m) != (0, 0, 0):
        raise ReplayMismatch(len(trace.steps), f"terminal indices {phi.indices} are not minimal")
    if f != canonical_size(trace.final):
        raise ReplayMismatch(len(trace.steps), f"terminal size index {f} differs from |nf|")
    return phi


# ---------------------------------------------------------------- lemma checks

def relevance_holds(d):
    """dom(context) is within the free variables, at every term node."""
    for _, n in nodes(d):
        if n.rule not in PATTERN_RULES and not n.context.domain() <= free_vars(n.subject):
            return False
    return True


def tight_spreading_holds(d):
    """Every N-subject node with a tight context has a tight type and a neutral rule."""
    for _, n in nodes(d):
        if n.rule in PATTERN_RULES or n.rule == "many":
            continue
        if in_pure_canonical(n.subject) and is_tight(n.context):
            if not is_tight(n.assigned) or n.rule in ("app", "abs", "abs_p", "pair", "pair_p"):
                return False
    return True


__all__ = [
    "TightReport", "antisubst_e", "check_e", "forward_replay_check", "is_tight_derivation",
    "is_valid_e", "relevance_holds", "root_counters", "subject_expand_e", "subject_reduce_e",
    "subst_e", "synthesize_tight", "tight_spreading_holds", "tight_type_canonical", "verify_exact",
]
