from __future__ import annotations

from fractions import Fraction

import pytest

from aslgames.errors import NonGroundComparison
from aslgames.parser import parse_term
from aslgames.terms import (
    Num, Struct, Sym, Var, complement, compare, format_number, format_term, is_ground,
    is_overwrite, list_items, make_list, sort_terms,
)


def test_numbers_print_exactly():
    assert format_number(Fraction(1, 3)) == "1r3"
    assert format_number(Fraction(5, 2)) == "2.5"
    assert format_number(Fraction(3)) == "3"
    assert format_number(Fraction(-2)) == "-2"


def test_rational_literal_round_trips():
    assert parse_term("1r3") == Num(Fraction(1, 3))
    assert parse_term("0.6") == Num(Fraction(3, 5))


def test_standard_order_numbers_then_atoms_then_compounds():
    terms = [parse_term(t) for t in ["b", "f(b)", "2.5", "g(a, b)", "a", "1", "f(a)"]]
    assert [format_term(t) for t in sort_terms(terms)] == ["1", "2.5", "a", "b", "f(a)", "f(b)", "g(a, b)"]


def test_compound_order_uses_arity_first():
    assert compare(parse_term("z(a)"), parse_term("a(a, a)")) < 0


def test_ordering_non_ground_terms_fails():
    with pytest.raises(NonGroundComparison):
        compare(Var("X"), Sym("a"))


def test_complement_is_an_involution():
    f = parse_term("seen(j, i)")
    assert complement(f) == Struct("~", (f,))
    assert complement(complement(f)) == f
    assert is_overwrite(complement(f)) and not is_overwrite(f)


def test_lists_build_and_split():
    items = [Sym("a"), Num(1)]
    assert list_items(make_list(items)) == items
    assert list_items(Sym("a")) is None


def test_groundness():
    assert is_ground(parse_term("f(a, [1, 2])"))
    assert not is_ground(parse_term("f(a, [X])"))


@pytest.mark.parametrize("text", [
    "f(a, b)", "~seen(j, i)", "[a, b | T]", "X is 1 + 2 * 3", "(a, b)", "\\+ p(X)",
    "{Y = X - 1}", "'hello world'", "payoff(P, -3)", "a - (b - c)", "- (1)", "1r3",
])
def test_printed_form_parses_back(text):
    t = parse_term(text)
    assert parse_term(format_term(t)) == t
