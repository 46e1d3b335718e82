"""Acceptance criteria 1-10.

Each criterion prints one PASS/FAIL line. Run directly for the summary:

    python tests/test_acceptance.py

Tolerances: all counters and sizes are compared exactly. Timing budgets
are checked on the best of 20 runs: 1 ms for criterion 1 and 10 ms for
criterion 2. The fuzz corpus is 500 terms from seed 42, size at most 12,
with a 200-step budget, and criterion 4 must finish within 60 s.
"""
from __future__ import annotations

import functools
import sys
import time
import timeit
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import EX1, EX2, EX3, term  # noqa: E402
from quantpat.cli import main  # noqa: E402
from quantpat.derivation import PATTERN_RULES, deriv_size, nodes  # noqa: E402
from quantpat.errors import BudgetExceeded, NotHeadNormalizing  # noqa: E402
from quantpat.generate import TermGenerator  # noqa: E402
from quantpat.reduction import (  # noqa: E402
    Classification, StepKind, classify, has_head_clash, head_normalize, head_redex,
    head_rule_instances, head_step, in_canonical, in_pure_canonical,
)
from quantpat.syntax import alpha_eq, free_vars, parse, show  # noqa: E402
from quantpat.system_e import (  # noqa: E402
    check_e, forward_replay_check, is_tight_derivation, subject_expand_e, subject_reduce_e,
    synthesize_tight, verify_exact,
)
from quantpat.system_u import (  # noqa: E402
    check_u, subject_expand_u, subject_reduce_u, synthesize_u,
)
from quantpat.transform import antisubst, rewrite_at, subst  # noqa: E402
from quantpat.types import TIGHT_N, TypingContext, is_tight, mset  # noqa: E402

SEED, COUNT, SIZE, BUDGET = 42, 500, 12, 200
TIME_EX1_S = 1e-3
TIME_EX2_S = 10e-3
TIME_FUZZ_S = 60.0


def _best(fn, repeat=20):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


@functools.lru_cache(maxsize=None)
def corpus():
    return tuple(TermGenerator(SEED, SIZE).terms(COUNT))


@functools.lru_cache(maxsize=None)
def normalizing():
    """(term, trace) for every head-normalizing, clash-free corpus term."""
    out = []
    for t in corpus():
        try:
            trace, _ = head_normalize(t, BUDGET)
        except BudgetExceeded:
            continue
        if in_canonical(trace.final):
            out.append((t, trace))
    return tuple(out)


def report(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return ok


# ---------------------------------------------------------------- criteria

def criterion_1():
    t = term(EX1)
    trace, c = head_normalize(t, 100)
    elapsed = _best(lambda: head_normalize(t, 100))
    ok = (c.b, c.e, c.m) == (4, 6, 1) and alpha_eq(trace.final, parse(r"\y1. w")) and elapsed < TIME_EX1_S
    return report(1, ok, f"EX1 counters {(c.b, c.e, c.m)} final {show(trace.final)} "
                         f"in {elapsed * 1e3:.3f} ms (limit 1 ms)")


def criterion_2():
    t = term(EX2)

    def run():
        d = synthesize_tight(t)
        check_e(d)
        return d, is_tight_derivation(d)

    d, tight = run()
    elapsed = _best(run)
    ok = (tight and d.indices == (4, 6, 2, 0) and d.context == TypingContext({"b": mset(TIGHT_N)})
          and elapsed < TIME_EX2_S)
    return report(2, ok, f"EX2 indices {d.indices} tight {tight} in {elapsed * 1e3:.2f} ms (limit 10 ms)")


def criterion_3():
    d = synthesize_tight(term(EX3))
    check_e(d)
    return report(3, d.indices == (3, 4, 1, 1), f"EX3 indices {d.indices}")


def criterion_4():
    start = time.perf_counter()
    mismatches = [show(t) for t, _ in normalizing() if not verify_exact(t, BUDGET).match]
    elapsed = time.perf_counter() - start
    ok = not mismatches and len(corpus()) >= 500 and elapsed < TIME_FUZZ_S
    return report(4, ok, f"{len(normalizing())}/{len(corpus())} normalizing, {len(mismatches)} mismatches, "
                         f"{elapsed:.1f} s")


def criterion_5():
    bad = []
    for t, trace in normalizing():
        d = synthesize_u(t, BUDGET)
        check_u(d)
        if len(trace.steps) > deriv_size(d):
            bad.append(show(t))
            continue
        for step in trace.steps:
            nxt = subject_reduce_u(d, step)
            if deriv_size(nxt) >= deriv_size(d):
                bad.append(show(t))
                break
            d = nxt
    return report(5, not bad, f"{len(bad)} bound or size-decrease violations")


def criterion_6():
    bad = []
    for t, trace in normalizing():
        try:
            forward_replay_check(synthesize_tight(t, BUDGET), trace)
        except AssertionError:
            bad.append(show(t))
    return report(6, not bad, f"{len(bad)} replay violations")


def criterion_7():
    bad = [show(t) for t in corpus() if len(head_rule_instances(t)) > 1]
    return report(7, not bad, f"{len(bad)} terms with more than one applicable head rule")


def criterion_8():
    bad = []
    for t in corpus():
        canonical = classify(t) in (Classification.PURE_CANONICAL, Classification.CANONICAL)
        if canonical != (head_step(t) is None and not has_head_clash(t)):
            bad.append(show(t))
    return report(8, not bad, f"{len(bad)} classification disagreements")


def _lemma_violations(d, check, reduce, expand, trace):
    out = []
    for _, n in nodes(d):
        if n.rule in PATTERN_RULES or n.rule == "many":
            continue
        if not n.context.domain() <= free_vars(n.subject):
            out.append("relevance")
        if has_head_clash(n.subject):
            out.append("clash-free")
        if n.indices is not None and in_pure_canonical(n.subject) and is_tight(n.context):
            if not is_tight(n.assigned) or n.rule in ("app", "abs", "abs_p", "pair", "pair_p"):
                out.append("tight spreading")
    for step in trace.steps:
        path = head_redex(step.pre_term)[0]
        if step.kind is StepKind.E:
            subs = []
            rewrite_at(d, path, lambda s, at: subs.append(s) or s)
            for s in subs:
                body, pat, arg = s.premises
                x, a = pat.subject.name, pat.assigned
                phi = subst(body, x, arg)
                check(phi)
                if deriv_size(phi) != deriv_size(body) + deriv_size(arg) - len(a):
                    out.append("substitution size")
                if phi.indices is not None and phi.indices != tuple(
                        p + q for p, q in zip(body.indices, arg.indices)):
                    out.append("substitution indices")
                phi_t, phi_u, a2 = antisubst(phi, s.subject.body, x, s.subject.arg)
                check(phi_t)
                if a2 != a or deriv_size(phi) != deriv_size(phi_t) + deriv_size(phi_u) - len(a2):
                    out.append("anti-substitution size")
                if phi.indices is not None and phi.indices != tuple(
                        p + q for p, q in zip(phi_t.indices, phi_u.indices)):
                    out.append("anti-substitution indices")
        nxt = reduce(d, step)
        back = expand(nxt, step)
        if (back.context, back.assigned, back.indices) != (d.context, d.assigned, d.indices):
            out.append("round trip")
        if (nxt.context, nxt.assigned) != (d.context, d.assigned):
            out.append("reduction judgment")
        d = nxt
    return out


def criterion_9():
    bad = []
    for t, trace in normalizing():
        phi_u = synthesize_u(t, BUDGET)
        phi_e = synthesize_tight(t, BUDGET)
        v = _lemma_violations(phi_u, check_u, subject_reduce_u, subject_expand_u, trace)
        v += _lemma_violations(phi_e, check_e, subject_reduce_e, subject_expand_e, trace)
        if v:
            bad.append((show(t), sorted(set(v))))
    return report(9, not bad, f"{len(bad)} lemma violations" + (f", first {bad[0]}" if bad else ""))


def criterion_10():
    omega = term("Omega")
    budget = 50
    code = main(["normalize", "-e", "Omega", "--max-steps", str(budget)], _Sink())
    try:
        head_normalize(omega, budget)
        loop = None
    except BudgetExceeded as exc:
        terms = exc.trace.terms()
        loop = next((k for k in range(1, len(terms)) if alpha_eq(terms[k], terms[0])), None)
    try:
        synthesize_tight(omega, budget)
        untypable = False
    except NotHeadNormalizing:
        untypable = True
    ok = code == 2 and loop is not None and loop <= budget and untypable
    return report(10, ok, f"exit {code}, self-loop at step {loop}, NotHeadNormalizing {untypable}")


class _Sink:
    def write(self, _):
        return 0


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion, capsys):
    ok = criterion()
    with capsys.disabled():
        print("\n" + capsys.readouterr().out.strip())
    assert ok


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
