from pathlib import Path

import pytest

from quantpat.derivation import (
    abs_, app, ax, deriv_size, deserialize, from_json, judgment_equal, many, match, nodes, pair,
    pat_v, serialize, to_json, type_pattern,
)
from quantpat.errors import FormatError, ShapeMismatch
from quantpat.syntax import parse
from quantpat.system_e import synthesize_tight
from quantpat.types import EMPTY, STAR_T, Arrow, TypingContext, mset

GOLDEN = Path(__file__).parent / "golden" / "nested_pair.deriv.json"


def test_sizes():
    assert deriv_size(ax("x", STAR_T)) == 1
    assert deriv_size(many([], parse("x"), False)) == 0


def test_size_of_beta_redex_derivation():
    # (\x. v) u typed by app over abs: two more nodes than the matching form
    body = ax("v", STAR_T)
    pi = pat_v("x", EMPTY)
    arg = many([ax("u", STAR_T)], parse("u"))
    d = app(abs_(body, pi), arg)
    assert deriv_size(d) == deriv_size(body) + deriv_size(pi) + deriv_size(arg) + 2
    assert deriv_size(match(body, pi, arg)) == deriv_size(d) - 1


def test_app_requires_arrow():
    with pytest.raises(ShapeMismatch):
        app(ax("f", STAR_T), many([], parse("y"), False))


def test_pair_over_empty_manys():
    d = pair(many([], parse("a"), False), many([], parse("b"), False))
    assert d.context == TypingContext({}) and str(d.assigned) != ""


def test_type_pattern_uses_context():
    ctx = TypingContext({"x": mset(STAR_T)})
    d = type_pattern(parse(r"\<x,y>. x").pattern, ctx)
    assert d.rule == "pat_x" and d.context == ctx


def test_ax_round_trip():
    d = ax("x", Arrow(EMPTY, STAR_T))
    assert deserialize(serialize(d)) == d


def test_unknown_rule_is_format_error():
    doc = serialize(ax("x", STAR_T))
    doc["rule"] = "weaken"
    with pytest.raises(FormatError):
        deserialize(doc)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("premises"),
    lambda d: d.update(extra=1),
    lambda d: d.update(context=[["x", "*"]]),
    lambda d: d.update(indices=[1, 2]),
    lambda d: d.update(subject="\\<x,x>. x"),
])
def test_malformed_documents(mutate):
    doc = serialize(ax("x", STAR_T))
    doc["indices"] = [0, 0, 0, 0]
    mutate(doc)
    with pytest.raises(FormatError):
        deserialize(doc)


def test_not_json():
    with pytest.raises(FormatError):
        from_json("{nope")


def test_nested_pair_derivation_round_trip(ex2):
    d = synthesize_tight(ex2)
    back = from_json(to_json(d))
    assert judgment_equal(d, back)
    assert all(judgment_equal(a, b) for (_, a), (_, b) in zip(nodes(d), nodes(back)))


def test_golden_file_matches_synthesis(ex2):
    assert judgment_equal(from_json(GOLDEN.read_text()), synthesize_tight(ex2))


def test_judgment_equal_ignores_many_order():
    a, b = ax("x", STAR_T), ax("x", Arrow(EMPTY, STAR_T))
    assert judgment_equal(many([a, b], parse("x")), many([b, a], parse("x")))
    assert not judgment_equal(many([a, a], parse("x")), many([a, b], parse("x")))


def test_node_count_law(ex2):
    d = synthesize_tight(ex2)
    all_nodes = [n for _, n in nodes(d)]
    assert deriv_size(d) == len(all_nodes) - sum(n.rule == "many" for n in all_nodes)
