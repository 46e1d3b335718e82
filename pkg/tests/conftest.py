import pytest

from quantpat.syntax import STANDARD_MACROS, macro_table, parse

MACROS = macro_table(STANDARD_MACROS)

EX1 = r"(\<x,y>. x (I y))[z/I] (I <K,w>)"
EX2 = r"(\<x,y>.(\<w,z>.w y z) x) <<K,a>,b>"
EX3 = r"(\z.(\<x,y>.I) z z) <u,v>"


def term(src):
    return parse(src, MACROS)


@pytest.fixture
def ex1():
    return term(EX1)


@pytest.fixture
def ex2():
    return term(EX2)


@pytest.fixture
def ex3():
    return term(EX3)
