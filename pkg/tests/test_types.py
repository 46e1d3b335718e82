import pytest

from quantpat.errors import ParseError
from quantpat.syntax import parse_pattern
from quantpat.types import (
    EMPTY, STAR_T, TIGHT_M, TIGHT_N, Arrow, Multiset, Product, TypingContext, context_erase,
    context_meet, context_restrict, is_tight, mset, multiset_union, parse_type, show_type,
)


def test_multiset_union():
    assert multiset_union(mset(STAR_T), mset(STAR_T)) == mset(STAR_T, STAR_T)
    a = mset(STAR_T, Arrow(EMPTY, STAR_T))
    assert multiset_union(EMPTY, a) == a
    assert multiset_union(a, mset(STAR_T)) == mset(STAR_T, STAR_T, Arrow(EMPTY, STAR_T))


def test_multiset_equality_ignores_order():
    arrow = Arrow(EMPTY, STAR_T)
    assert mset(STAR_T, arrow, STAR_T) == mset(arrow, STAR_T, STAR_T)
    assert Arrow(mset(STAR_T, arrow), STAR_T) == Arrow(mset(arrow, STAR_T), STAR_T)


def test_context_meet():
    assert context_meet([]) == TypingContext({})
    g = TypingContext({"x": mset(STAR_T)})
    assert context_meet([g, g]) == TypingContext({"x": mset(STAR_T, STAR_T)})
    h = TypingContext({"y": mset(TIGHT_N)})
    assert context_meet([g, h]) == TypingContext({"x": mset(STAR_T), "y": mset(TIGHT_N)})


def test_restrict_and_erase():
    g = TypingContext({"x": mset(STAR_T), "y": mset(STAR_T)})
    assert context_restrict(g, parse_pattern("x")) == TypingContext({"x": mset(STAR_T)})
    assert context_restrict(TypingContext({}), parse_pattern("<a,b>")) == TypingContext({})
    assert context_erase(g, {"x"}) == TypingContext({"y": mset(STAR_T)})
    assert context_erase(g, set()) == g
    assert context_erase(TypingContext({"x": mset(STAR_T)}), {"x", "y"}) == TypingContext({})


def test_meet_of_restrict_and_erase_is_identity():
    g = TypingContext({"x": mset(STAR_T), "z": mset(TIGHT_N), "w": EMPTY})
    p = parse_pattern("<x,y>")
    assert context_meet([context_restrict(g, p), context_erase(g, {"x", "y"})]) == g


def test_empty_entries_are_invisible():
    assert TypingContext({"x": EMPTY}) == TypingContext({})
    assert TypingContext({})("x") == EMPTY


def test_is_tight():
    assert is_tight(TIGHT_N)
    assert not is_tight(Arrow(mset(TIGHT_M), TIGHT_N))
    assert is_tight(TypingContext({"b": mset(TIGHT_N)}))
    assert not is_tight(STAR_T)


@pytest.mark.parametrize("src", ["*", "*N", "[*N, *M] -> *N", "[[*] x []] -> *", "[] x [*M]", "[]"])
def test_type_text_round_trip(src):
    ty = parse_type(src)
    assert parse_type(show_type(ty)) == ty


def test_product_components_are_multisets():
    ty = parse_type("[*] x [*N]")
    assert isinstance(ty, Product) and isinstance(ty.left, Multiset)
    with pytest.raises(ParseError):
        parse_type("[[[*M] x [*N]]]")
