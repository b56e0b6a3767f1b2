from __future__ import annotations

from fractions import Fraction

import pytest

from aslgames.engine import Clause, KnowledgeBase, substitute, unify
from aslgames.errors import (
    ArithmeticFault, InstantiationError, NonGroundComparison, RetractMissing, UnboundArithmetic,
    UnknownPredicate,
)
from aslgames.parser import parse_clauses, parse_term
from aslgames.terms import Num, Sym, Var, format_term


def kb_of(text: str, dynamic=(), seed: int = 0) -> KnowledgeBase:
    return KnowledgeBase([c for c, _ in parse_clauses(text)], dynamic, seed)


def answers(kb: KnowledgeBase, goal: str, var: str = "X") -> list[str]:
    return [format_term(substitute(Var(var), s)) for s in kb.solve(parse_term(goal))]


def test_unify_binds_and_occurs_check():
    s = unify(parse_term("f(X, b)"), parse_term("f(a, Y)"))
    assert substitute(parse_term("g(X, Y)"), s) == parse_term("g(a, b)")
    assert unify(parse_term("f(X)"), Var("X")) is None
    assert unify(parse_term("f(a)"), parse_term("g(a)")) is None


def test_clause_order_and_backtracking():
    kb = kb_of("p(1). p(2). p(3). q(X) :- p(X), X > 1.")
    assert answers(kb, "q(X)") == ["2", "3"]


def test_negation_as_failure():
    kb = kb_of("p(1). p(2). q(X) :- p(X), \\+ X = 1.")
    assert answers(kb, "q(X)") == ["2"]
    assert kb.succeeds(parse_term("\\+ p(7)"))


def test_brace_arithmetic_is_exact():
    kb = kb_of("")
    assert answers(kb, "{X = 1/3 + 0.5}") == ["5r6"]
    assert kb.succeeds(parse_term("{2 = 4/2}"))
    assert not kb.succeeds(parse_term("{3 = 4/2}"))


def test_is_and_comparisons():
    kb = kb_of("")
    assert answers(kb, "X is 2 * (3 - 1)") == ["4"]
    assert kb.succeeds(parse_term("1r3 < 0.34"))
    assert kb.succeeds(parse_term("0.5 =:= 1/2"))


def test_arithmetic_errors():
    kb = kb_of("")
    with pytest.raises(UnboundArithmetic):
        list(kb.solve(parse_term("X < 1")))
    with pytest.raises(ArithmeticFault):
        list(kb.solve(parse_term("X is 1 / 0")))


def test_standard_order_builtins():
    kb = kb_of("")
    assert kb.succeeds(parse_term("alice @< bob"))
    assert kb.succeeds(parse_term("1 @< a"))
    with pytest.raises(NonGroundComparison):
        list(kb.solve(parse_term("X @< a")))


def test_unknown_predicate_raises_but_dynamic_fails():
    kb = kb_of("", dynamic=[("seen", 2)])
    with pytest.raises(UnknownPredicate):
        list(kb.solve(parse_term("zz(X)")))
    assert not kb.succeeds(parse_term("seen(a, b)"))


def test_member_and_findall():
    kb = kb_of("p(1). p(2).")
    assert answers(kb, "member(X, [a, b])") == ["a", "b"]
    assert answers(kb, "findall(Y, p(Y), X)") == ["[1, 2]"]


def test_random_member_is_seeded_and_memoized():
    kb = kb_of("", seed=0)
    first = answers(kb, "random_member(X, [a, b, c])")
    assert len(first) == 1
    assert answers(kb, "random_member(X, [a, b, c])") == first
    picks = set()
    for seed in range(20):
        kb.reset_random(seed)
        picks.update(answers(kb, "random_member(X, [a, b, c])"))
    assert picks == {"a", "b", "c"}


def test_assert_retract_overlay():
    kb = kb_of("", dynamic=[("at", 2)])
    fact = parse_term("at(alice, shore)")
    kb.assert_facts([fact])
    assert kb.succeeds(parse_term("at(alice, X)"))
    kb.retract_facts([fact])
    assert not kb.succeeds(parse_term("at(alice, X)"))
    with pytest.raises(RetractMissing):
        kb.retract_facts([fact])
    with pytest.raises(InstantiationError):
        kb.assert_facts([parse_term("at(X, shore)")])


def test_assumed_restores_on_error():
    kb = kb_of("", dynamic=[("f", 1)])
    with pytest.raises(RuntimeError):
        with kb.assumed([parse_term("f(1)")]):
            raise RuntimeError
    assert kb.overlay_facts() == []


def test_clone_is_independent():
    kb = kb_of("", dynamic=[("f", 1)])
    other = kb.clone()
    other.assert_facts([parse_term("f(1)")])
    assert not kb.succeeds(parse_term("f(1)"))


def test_recursion_with_lists():
    kb = kb_of("len([], 0). len([_ | T], N) :- len(T, M), N is M + 1.")
    assert answers(kb, "len([a, b, c], X)") == ["3"]


def test_clause_rejects_bad_heads():
    with pytest.raises((TypeError, ValueError, InstantiationError)):
        Clause(Num(1))
