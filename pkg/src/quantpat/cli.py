"""Command-line front end.

Exit codes: 0 success, 1 bad input (parse, linearity or file format),
2 no head normal form within the budget, 3 rule violation, 4 exactness
mismatch or fuzz failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .derivation import deriv_size, from_json, pair_e_reading, to_json
from .errors import BudgetExceeded, FormatError, NotHeadNormalizing, ParseError, RuleViolation
from .generate import fuzz
from .reduction import (
    Classification, canonical_size, classify, format_trace, full_steps, head_normalize,
    joinability_probe,
)
from .syntax import STANDARD_MACROS, parse, show
from .system_e import check_e, is_tight_derivation, synthesize_tight, verify_exact
from .system_u import check_u, synthesize_u

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_VIOLATION, EXIT_FAILURE = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    command: str
    expr: str | None = None
    file: str | None = None
    max_steps: int = 10000
    seed: int = 42
    count: int = 500
    size: int = 12
    strategy: str = "head"
    system: str = "e"
    out: str | None = None
    macros: bool = True
    pair_e_reading: str = "sum"

    def __post_init__(self):
        if self.max_steps < 0:
            raise ValueError("--max-steps must be non-negative")
        if self.size < 1:
            raise ValueError("--size must be at least 1")

    def source(self):
        if self.expr is not None:
            return self.expr
        if self.file is not None:
            return Path(self.file).read_text(encoding="utf-8")
        raise ValueError("give an input with -e EXPR or -f FILE")

    def term(self):
        return parse(self.source().strip(), STANDARD_MACROS if self.macros else None)


def _emit(cfg, text, out):
    out.write(text)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")


def cmd_normalize(cfg, out):
    t = cfg.term()
    if cfg.strategy == "full-probe":
        lines = [f"{r.kind} {list(r.path)} {show(r.result)}" for r in full_steps(t)]
        joinable = joinability_probe(t, budget=min(cfg.max_steps, 4))
        lines.append(f"JOINABLE {'yes' if joinable else 'no'}")
        _emit(cfg, "\n".join(lines) + "\n", out)
        return EXIT_OK
    try:
        trace, counters = head_normalize(t, cfg.max_steps)
    except BudgetExceeded as exc:
        _emit(cfg, format_trace(exc.trace) + "BUDGET EXCEEDED\n", out)
        return EXIT_BUDGET
    _emit(cfg, format_trace(trace, counters), out)
    return EXIT_OK


def cmd_classify(cfg, out):
    t = cfg.term()
    c = classify(t)
    text = str(c)
    if c in (Classification.PURE_CANONICAL, Classification.CANONICAL):
        text += f" size {canonical_size(t)}"
    _emit(cfg, text + "\n", out)
    return EXIT_OK


def cmd_check(cfg, out):
    d = from_json(cfg.source())
    try:
        if cfg.system == "u":
            check_u(d)
        else:
            check_e(d, cfg.pair_e_reading)
    except RuleViolation as exc:
        _emit(cfg, f"VIOLATION {exc}\n", out)
        return EXIT_VIOLATION
    lines = ["OK", "TIGHT" if is_tight_derivation(d) else "NOT TIGHT"]
    if cfg.system == "u":
        lines.append(f"SIZE {deriv_size(d)}")
    else:
        lines.append("INDICES " + " ".join(str(i) for i in d.indices))
    _emit(cfg, "\n".join(lines) + "\n", out)
    return EXIT_OK


def cmd_synthesize(cfg, out):
    t = cfg.term()
    try:
        if cfg.system == "u":
            d = synthesize_u(t, cfg.max_steps)
        else:
            d = synthesize_tight(t, cfg.max_steps, cfg.pair_e_reading)
    except NotHeadNormalizing as exc:
        out.write(f"NOT HEAD NORMALIZING {exc}\n")
        return EXIT_BUDGET
    _emit(cfg, to_json(d) + "\n", out)
    return EXIT_OK


def cmd_verify(cfg, out):
    t = cfg.term()
    try:
        report = verify_exact(t, cfg.max_steps, cfg.pair_e_reading)
    except NotHeadNormalizing as exc:
        out.write(f"NOT HEAD NORMALIZING {exc}\n")
        return EXIT_BUDGET
    _emit(cfg, report.summary() + "\n", out)
    return EXIT_OK if report.match else EXIT_FAILURE


def cmd_fuzz(cfg, out):
    extra = [cfg.term()] if (cfg.expr is not None or cfg.file is not None) else []
    steps = min(cfg.max_steps, 200)
    summary = fuzz(cfg.seed, cfg.count, cfg.size, steps, cfg.pair_e_reading, extra)
    _emit(cfg, "\n".join(summary.lines()) + "\n", out)
    return EXIT_FAILURE if summary.failure else EXIT_OK


COMMANDS = {
    "normalize": cmd_normalize,
    "classify": cmd_classify,
    "check": cmd_check,
    "synthesize": cmd_synthesize,
    "verify": cmd_verify,
    "fuzz": cmd_fuzz,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="quantpat", description="Head reduction and quantitative types "
                                 "for a pattern calculus.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    src = ap.add_mutually_exclusive_group()
    src.add_argument("-e", dest="expr", metavar="EXPR", help="inline term")
    src.add_argument("-f", dest="file", metavar="FILE", help="term file, or derivation file for check")
    ap.add_argument("--system", choices=("u", "e"), default="e")
    ap.add_argument("--max-steps", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--size", type=int, default=12)
    ap.add_argument("--strategy", choices=("head", "full-probe"), default="head")
    ap.add_argument("--out", metavar="PATH")
    ap.add_argument("--macros", choices=("on", "off"), default="on")
    ap.add_argument("--pair-e-reading", choices=("sum", "paper"), default="sum")
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.expr, args.file, args.max_steps, args.seed, args.count,
                        args.size, args.strategy, args.system, args.out, args.macros == "on",
                        args.pair_e_reading)
        with pair_e_reading(cfg.pair_e_reading):
            return COMMANDS[cfg.command](cfg, out)
    except (ParseError, FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
