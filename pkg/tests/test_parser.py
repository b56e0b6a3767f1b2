from __future__ import annotations

import pytest

from aslgames.errors import AslSyntaxError
from aslgames.parser import parse_clauses, parse_term
from aslgames.terms import Struct, Sym, format_term


def test_comments_and_line_numbers():
    text = "% header\np(a).\n/* block\ncomment */\nq(X) :- p(X).\n"
    parsed = parse_clauses(text)
    assert [line for _, line in parsed] == [2, 5]
    assert format_term(parsed[1][0].head) == "q(X)"


def test_rule_mixfix_structure():
    t = parse_term("rule(r, choice, 0, if role(P, x) then can(P, a) where [time(0)])")
    body = t.args[3]
    assert isinstance(body, Struct) and body.functor == "if_then_where"
    cond, conseq, constraints = body.args
    assert format_term(cond) == "role(P, x)"
    assert format_term(conseq) == "can(P, a)"
    assert format_term(constraints) == "[time(0)]"


def test_control_consequence_binds_withprob_looser_than_and():
    t = parse_term("[payoff(A, 1) and payoff(B, 2) withProb 0.5]")
    item = t.args[0]
    assert item.functor == "withProb"
    assert item.args[0].functor == "and"


def test_overwrite_operator():
    t = parse_term("~can(P, defect)")
    assert t == Struct("~", (parse_term("can(P, defect)"),))
    assert parse_term("~defect") == Struct("~", (Sym("defect"),))


def test_operator_precedence():
    assert parse_term("1 + 2 * 3") == parse_term("1 + (2 * 3)")
    assert parse_term("a - b - c") == parse_term("(a - b) - c")


def test_syntax_error_has_position():
    with pytest.raises(AslSyntaxError) as info:
        parse_clauses("p(a).\nq(b :- .", "f.asl")
    err = info.value
    assert (err.file, err.line) == ("f.asl", 2)
    assert err.column > 0
    assert str(err).startswith("f.asl:2:")


def test_missing_full_stop():
    with pytest.raises(AslSyntaxError):
        parse_clauses("p(a)")


def test_unterminated_block_comment():
    with pytest.raises(AslSyntaxError):
        parse_clauses("p(a). /* never closed")


def test_quoted_atoms():
    assert parse_term("'hello world'") == Sym("hello world")
