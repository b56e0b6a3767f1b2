from __future__ import annotations

import itertools

import pytest

from aslgames.engine import evaluate, flatten_conjunction, substitute, unify
from aslgames.interpreter import query_rule
from aslgames.parser import parse_term
from aslgames.solver import UtilitySpec, assign_utilities, backtrack_solve, load_criteria_file
from aslgames.terms import Num, Struct, Var, complement, compare, is_ground, list_items, make_list

from conftest import CONFIGS, FISHERS_CRITERIA, build_corpus
from invariants import check_equilibrium, check_frame, check_structure

ARITH = {"<": lambda a, b: a < b, ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
         "=<": lambda a, b: a <= b}


def _test_builtin(goal: Struct, s: dict) -> dict | None:
    """Evaluate a builtin goal over a ground binding; may bind the left side of ``{V = expr}``."""
    if goal.functor == "{}":
        lhs, rhs = goal.args[0].args
        lhs = substitute(lhs, s)
        value = evaluate(rhs, s)
        if isinstance(lhs, Var):
            return {**s, lhs: Num(value)}
        return s if evaluate(lhs, s) == value else None
    a, b = (substitute(x, s) for x in goal.args)
    if goal.functor == "@<":
        return s if compare(a, b) < 0 else None
    if goal.functor == "\\=":
        return s if unify(a, b) is None else None
    if goal.functor in ARITH:
        return s if ARITH[goal.functor](evaluate(a, s), evaluate(b, s)) else None
    raise AssertionError(f"oracle does not handle {goal.functor}")


def brute_force(rule, facts: list) -> set:
    """All ground consequences of ``rule`` by trying every tuple of matching facts for its atoms."""
    goals = flatten_conjunction(rule.condition, ("and",)) + list_items(rule.constraints)
    atoms = [g for g in goals if g.functor not in ARITH and g.functor not in ("{}", "@<", "\\=")]
    tests = [g for g in goals if g not in atoms]
    by_key = {}
    for f in facts:
        by_key.setdefault((f.functor, f.arity) if isinstance(f, Struct) else (str(f), 0), []).append(f)

    def bindings(i: int, s: dict):
        if i == len(atoms):
            yield s
            return
        for fact in by_key.get((atoms[i].functor, atoms[i].arity), []):
            s2 = unify(atoms[i], fact, s)
            if s2 is not None:
                yield from bindings(i + 1, s2)

    out = set()
    for s in bindings(0, {}):
        for t in tests:
            s = _test_builtin(t, s)
            if s is None:
                break
        if s is None:
            continue
        if rule.type_name == "control":
            items = [Struct("withProb", (substitute(i.args[0], s), Num(evaluate(i.args[1], s))))
                     for i in list_items(rule.consequence)]
            conseq = make_list(items)
        else:
            conseq = substitute(rule.consequence, s)
        assert is_ground(conseq)
        out.add((rule.index, conseq))
    return out


def engine_answers(kb, rule_type: str, thres: int) -> set:
    return {(a.rule.index, a.consequence) for a in query_rule(kb, "ipd", rule_type, thres)}


@pytest.mark.parametrize("thres", [0, 1, 2])
def test_ipd_instantiation_matches_brute_force(thres):
    kb, game = build_corpus("ipd", thres)
    staged = [f for f in kb.overlay_facts()]
    agents = [parse_term("agent(alice)"), parse_term("agent(bob)")]
    actions = [parse_term("cooperate"), parse_term("defect")]
    for info in game.rounds:
        state = list(game.annotation.fluents[info.root])
        universe = agents + staged + state
        with kb.assumed(state):
            for rule_type in ("boundary", "position", "choice"):
                expected = set().union(*(brute_force(r, universe) for r in kb.rules
                                         if r.type_name == rule_type and r.priority_value <= thres))
                assert engine_answers(kb, rule_type, thres) == expected
            for a1, a2 in itertools.product(actions, repeat=2):
                mu = [Struct("does", (parse_term("alice"), a1)), Struct("does", (parse_term("bob"), a2))]
                with kb.assumed(mu):
                    expected = set().union(*(brute_force(r, universe + mu) for r in kb.rules
                                             if r.type_name == "control" and r.priority_value <= thres))
                    assert engine_answers(kb, "control", thres) == expected


@pytest.mark.parametrize("cfg", CONFIGS, ids=[f"{n}-t{t}-s{s}" for n, t, s in CONFIGS])
def test_corpus_invariants(corpus_games, cfg):
    kb, game = corpus_games[cfg]
    check_structure(game)
    check_frame(kb, game)
    if cfg[0] == "fishers":
        spec, _ = load_criteria_file(FISHERS_CRITERIA)
    else:
        spec = UtilitySpec()
    assign_utilities(game, spec, kb)
    for selection in ("first", "max-welfare", "all"):
        report = backtrack_solve(game, selection)
        for alt in report.alternatives or [report]:
            check_equilibrium(game, alt)


def test_ipd_backward_induction_oracle():
    """Finitely repeated PD with a strictly dominant stage action: defect everywhere."""
    kb, game = build_corpus("ipd")
    assign_utilities(game)
    report = backtrack_solve(game, "all")
    assert len(report.alternatives) == 1
    defect = parse_term("defect")
    for w, dist in report.profile.items():
        assert dist[game.infosets[w].actions.index(defect)] == 1


def test_no_simple_conseq_and_its_complement():
    from aslgames.interpreter import get_simple_conseqs
    kb, game = build_corpus("ipd", 1)
    for info in game.rounds:
        with kb.assumed(game.annotation.fluents[info.root]):
            fs = get_simple_conseqs(kb, "ipd", "choice", 1)
        assert not any(complement(f) in fs for f in fs)
