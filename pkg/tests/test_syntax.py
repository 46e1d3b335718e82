import pytest

from conftest import term
from quantpat.errors import LinearityError, ParseError
from quantpat.syntax import (
    Abs, App, Match, PPair, PVar, Pair, Var, alpha_eq, free_vars, fresh_name, fresh_rename,
    parse, parse_pattern, show,
)


def test_parse_abstraction_with_macro_name_left_free():
    t = parse(r"\<x,y>. x (I y)")
    assert t == Abs(PPair(PVar("x"), PVar("y")), App(Var("x"), App(Var("I"), Var("y"))))


def test_parse_rejects_nonlinear_pattern():
    with pytest.raises(LinearityError) as info:
        parse(r"\<x,x>. x")
    assert info.value.name == "x"


def test_matching_binds_tighter_than_application():
    assert parse("x [<z,w> / y] v") == App(Match(Var("x"), PPair(PVar("z"), PVar("w")), Var("y")), Var("v"))


def test_unicode_lambda_and_trailing_abstraction():
    assert parse("λx. x") == parse(r"\x. x")
    assert parse(r"f \x. x") == App(Var("f"), Abs(PVar("x"), Var("x")))


@pytest.mark.parametrize("bad", ["", "(x", r"\. x", "<x y>", "x[<a,b>]", "x )"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse(bad)


def test_macros_expand_to_closed_terms():
    assert term("I") == Abs(PVar("z"), Var("z"))
    assert free_vars(term("Omega")) == frozenset()


@pytest.mark.parametrize("src", [
    r"\<x,y>. x (I y)", r"x[<x,y>/z]", r"(\z. z) ((\<a,b>. a) <c, d>)",
    r"<\x. x, y z>[<p,q>/r] s", r"f (\x. x) y", r"((x y)[z/w]) v",
])
def test_show_parse_round_trip(src):
    t = parse(src)
    assert parse(show(t)) == t


def test_alpha_eq_examples():
    assert alpha_eq(parse(r"\<x,y>. x z"), parse(r"\<x1,y1>. x1 z"))
    assert alpha_eq(parse("x[<x,y>/z]"), parse("x1[<x1,y1>/z]"))
    assert not alpha_eq(parse("x"), parse("y"))
    assert not alpha_eq(parse(r"\<x,y>. x"), parse(r"\<x,y>. y"))
    assert not alpha_eq(parse(r"\x. x"), parse(r"\<x,y>. x"))


def test_free_vars():
    assert free_vars(parse(r"\z. z")) == frozenset()
    assert free_vars(parse("x[<x,y>/z]")) == {"z"}
    assert free_vars(parse(r"\<x,y>. x w")) == {"w"}


def test_fresh_name_strips_digits():
    assert fresh_name("y", {"y"}) == "y1"
    assert fresh_name("y1", {"y", "y1"}) == "y2"


def test_fresh_rename():
    t = fresh_rename(parse(r"\z. z"), {"z"})
    assert isinstance(t, Abs) and t.pattern.name != "z" and alpha_eq(t, parse(r"\z. z"))
    assert fresh_rename(parse("x"), {"x"}) == Var("x")
    t = fresh_rename(parse("x[<x,y>/u]"), {"x"})
    assert "x" not in {t.pattern.left.name} and t.body == Var(t.pattern.left.name)
    assert alpha_eq(t, parse("x[<x,y>/u]"))


def test_parse_pattern():
    assert parse_pattern("<a,<b,c>>") == PPair(PVar("a"), PPair(PVar("b"), PVar("c")))
    with pytest.raises(LinearityError):
        parse_pattern("<a,a>")


def test_pair_constructor_prints_angle_brackets():
    assert show(Pair(Var("a"), Var("b"))) == "<a, b>"
