"""System U: upper bounds on head-normalisation.

A derivation of size s guarantees that the head strategy stops within
s steps. Derivations are produced by typing the head normal form and
expanding backwards along the trace.
"""
from __future__ import annotations

from . import transform
from .check import check
from .derivation import abs_, app, ax, deriv_size, many, match, pair, type_pattern
from .errors import BudgetExceeded, NotCanonical, NotHeadNormalizing, ShapeMismatch
from .reduction import (
    Step, StepKind, full_steps, head_normalize, in_canonical, in_pure_canonical,
)
from .syntax import Abs, App, Match, Pair, Var, alpha_eq, pattern_vars, show
from .types import EMPTY, STAR_T, Arrow


def check_u(d):
    """Raise RuleViolation at the first node that breaks a rule of System U."""
    check(d, "u")


def is_valid_u(d):
    try:
        check_u(d)
    except Exception:
        return False
    return True


def subst_u(phi_t, x, phi_u):
    return transform.subst(phi_t, x, phi_u)


def antisubst_u(phi, t, x, u):
    return transform.antisubst(phi, t, x, u)


def _step(step):
    if isinstance(step, Step):
        return step.pre_term, step.kind
    pre, kind = step
    return pre, StepKind(kind)


def subject_reduce_u(phi, step, full=False, path=None):
    """Carry phi across one step.

    The head step of the pre-term is used unless ``full`` is set; a full
    step is located by ``path``, or by the first redex of its kind.
    """
    pre, kind = _step(step)
    if full and path is None:
        path = next((r.path for r in full_steps(pre) if r.kind is kind), None)
        if path is None:
            raise ShapeMismatch("pre-term has no redex of this kind", (), kind.value, None)
    return transform.subject_reduce(phi, pre, kind, path if full else None)


def subject_expand_u(phi_after, step, path=None):
    pre, kind = _step(step)
    return transform.subject_expand(phi_after, pre, kind, path)


# ---------------------------------------------------------------- canonical forms

def _neutral(t, sigma):
    if isinstance(t, Var):
        return ax(t.name, sigma)
    if isinstance(t, App):
        fun = _neutral(t.fun, Arrow(EMPTY, sigma))
        return app(fun, many([], t.arg, False))
    return _blocked(t, _neutral(t.body, sigma))


def _blocked(t, body):
    # t = M[<p1,p2>/N]: type N at the product the pattern demands
    pat = type_pattern(t.pattern, body.context.restrict(pattern_vars(t.pattern)))
    (product,) = pat.assigned.items
    arg = _neutral(t.arg, product)
    return match(body, pat, many([arg], t.arg))


def _canonical(t):
    if isinstance(t, Abs):
        body = _canonical(t.body)
        return abs_(body, type_pattern(t.pattern, body.context.restrict(pattern_vars(t.pattern))))
    if isinstance(t, Pair):
        return pair(many([], t.fst, False), many([], t.snd, False))
    if isinstance(t, Match) and not in_pure_canonical(t):
        return _blocked(t, _canonical(t.body))
    return _neutral(t, STAR_T)


def type_canonical_u(t):
    """A System U derivation of a canonical form, using minimal types."""
    if not in_canonical(t):
        raise NotCanonical(f"not a canonical form: {show(t)}")
    return _canonical(t)


def synthesize_u(t, max_steps=10000):
    try:
        trace, _ = head_normalize(t, max_steps)
    except BudgetExceeded as exc:
        raise NotHeadNormalizing(f"no head normal form within {max_steps} steps", exc.trace) from exc
    if not in_canonical(trace.final):
        raise NotHeadNormalizing(f"head normal form {show(trace.final)} contains a clash", trace)
    phi = type_canonical_u(trace.final)
    for step in reversed(trace.steps):
        phi = subject_expand_u(phi, step)
    return phi


def transport_judgment(phi, t_from, t_to, step, direction="forward"):
    """Move phi across one step of the full relation, keeping (context, type).

    ``step`` is (pre_term, kind). Forward: phi types the pre-term t_from
    and the result types t_to. Backward: phi types the successor t_from
    and the result types the pre-term t_to.
    """
    pre, kind = _step(step)
    after = t_to if direction == "forward" else t_from
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    if not alpha_eq(pre, t_from if direction == "forward" else t_to):
        raise ShapeMismatch("step does not start at the expected term", (), show(pre), None)
    cands = [r for r in full_steps(pre) if r.kind is kind and alpha_eq(r.result, after)]
    if not cands:
        raise ShapeMismatch("no such step between the two terms", (), show(after), None)
    path = cands[0].path
    if direction == "forward":
        out = transform.subject_reduce(phi, pre, kind, path)
    else:
        out = transform.subject_expand(phi, pre, kind, path)
    if out.context != phi.context or out.assigned != phi.assigned:
        raise ShapeMismatch("judgment changed in transport", (), (phi.context, phi.assigned),
                            (out.context, out.assigned))
    return out


__all__ = [
    "antisubst_u", "check_u", "deriv_size", "is_valid_u", "subject_expand_u", "subject_reduce_u",
    "subst_u", "synthesize_u", "transport_judgment", "type_canonical_u",
]
