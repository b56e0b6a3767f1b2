"""Structural and equilibrium checks shared by the corpus and random-description suites."""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction

from aslgames.game import ExtensiveGame, validate_game_round, validate_perfect_recall, validate_tree
from aslgames.interpreter import check_incompatible
from aslgames.parser import parse_term
from aslgames.terms import Struct
from aslgames.solver import SolveReport, expected_payoffs, is_equilibrium, round_to_normal_form


def check_structure(game: ExtensiveGame) -> None:
    assert validate_tree(game) == []
    for info in game.rounds:
        assert validate_game_round(game.subround(info)) == [], f"round at {info.root}"
    assert validate_perfect_recall(game)
    for x in game.chance_nodes:
        assert sum((game.chance_prob[c] for c in game.children[x]), Fraction(0)) == 1


def check_frame(kb, game: ExtensiveGame) -> None:
    """Every pre-round fluent survives into each next state unless it clashes with it."""
    for info in game.rounds:
        before = game.annotation.fluents[info.root]
        for z in info.leaves:
            after = game.annotation.fluents[z]
            path = game.path(z)
            path = path[path.index(info.root):]
            mu = [Struct("does", (parse_term(game.turn[a]), game.label[b]))
                  for a, b in zip(path, path[1:]) if b in game.label]
            with kb.assumed(mu):
                for f in before:
                    assert f in after or check_incompatible(kb, f, after), (info.root, z, str(f))


def _pure_equilibria(nf) -> set[tuple[int, ...]]:
    out = set()
    for cell in itertools.product(*(range(len(a)) for a in nf.actions)):
        base = nf.payoffs[cell]
        ok = True
        for k, acts in enumerate(nf.actions):
            for i in range(len(acts)):
                dev = list(cell)
                dev[k] = i
                if nf.payoffs[tuple(dev)][k] > base[k]:
                    ok = False
        if ok:
            out.add(cell)
    return out


def check_equilibrium(game: ExtensiveGame, report: SolveReport) -> None:
    """No profitable deviation in any round, against independently recomputed values."""
    values: dict[int, tuple[Fraction, ...]] = {}
    for x in reversed(list(game.walk())):
        kids = game.children[x]
        if not kids:
            values[x] = tuple(game.utilities[x])
            continue
        weights = ([game.chance_prob[c] for c in kids] if game.is_chance(x)
                   else report.profile[game.node_infoset[x]])
        values[x] = tuple(sum((p * values[c][k] for c, p in zip(kids, weights)), Fraction(0))
                          for k in range(len(game.players)))
    assert values == report.node_values
    assert sum(report.outcome_dist.values(), Fraction(0)) == 1
    for info in game.rounds:
        nf = round_to_normal_form(game, info, values)
        prof = tuple(report.profile[w] for w in info.infosets)
        assert is_equilibrium(nf, prof), f"profitable deviation in round {info.root}"
        assert expected_payoffs(nf, prof, full=True) == values[info.root]
        if all(max(d) == 1 for d in prof):
            cell = tuple(d.index(1) for d in prof)
            assert cell in _pure_equilibria(nf)


def _expected_actions(rd, n: int) -> list[str]:
    """Priority resolution by hand: highest priority wins, overwrites win ties."""
    out = []
    for a, grant in rd.grants:
        if grant > rd.thres:
            continue
        bans = [p for b, p, min_n in rd.bans if b == a and p <= rd.thres and n >= min_n]
        if bans and max(bans) >= grant:
            continue
        out.append(a)
    return out


@functools.lru_cache(maxsize=None)
def check_random_description(seed: int) -> str:
    """Run every property on one generated description; returns "solved" or "unsupported"."""
    from aslgames.builder import BuildConfig, build_full_game
    from aslgames.description import errors_only, lower, parse_description, validate
    from aslgames.errors import UnsupportedShape
    from aslgames.solver import assign_utilities, backtrack_solve
    from aslgames.terms import format_term

    from randgen import random_description

    rd = random_description(seed)
    d = parse_description(agents=rd.agents, states=rd.states, rules=rd.rules)
    assert errors_only(validate(d)) == []
    kb = lower(d, seed=seed)
    game, ann = build_full_game(kb, BuildConfig(thres=rd.thres, seed=seed))
    check_structure(game)
    check_frame(kb, game)
    for info in game.rounds:
        n = next(int(format_term(f)[2:-1]) for f in ann.fluents[info.root] if format_term(f).startswith("n("))
        for w in info.infosets:
            assert [format_term(a) for a in game.infosets[w].actions] == _expected_actions(rd, n)
    assign_utilities(game)
    try:
        report = backtrack_solve(game)
    except UnsupportedShape:
        assert rd.n_agents > 2
        return "unsupported"
    check_equilibrium(game, report)
    return "solved"
