"""Seeded generator of small random ASL descriptions for property tests."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction


@dataclass
class RandomDescription:
    agents: str
    states: str
    rules: str
    n_agents: int
    actions: list[str]
    # (action, priority) for plain choice rules and (action, priority, min_n) for overwrites
    grants: list[tuple[str, int]]
    bans: list[tuple[str, int, int]]
    thres: int


def _prob_split(rng: random.Random, max_parts: int) -> list[Fraction]:
    k = min(rng.choice([1, 1, 2, 2, 3]), max_parts)
    if k == 1:
        return [Fraction(1)]
    den = rng.choice([2, 3, 4, 5, 10])
    cuts = sorted(rng.sample(range(1, den), min(k - 1, den - 1)))
    parts = [Fraction(b - a, den) for a, b in zip([0] + cuts, cuts + [den])]
    return parts


def random_description(seed: int) -> RandomDescription:
    rng = random.Random(seed)
    n_agents = rng.choices([1, 2, 3], weights=[2, 6, 1])[0]
    n_actions = 2 if n_agents == 3 else rng.choice([2, 3])
    actions = [f"x{j}" for j in range(n_actions)]
    # keep trees small: deep games only with few agents and binary lotteries
    depth = 1 if n_agents == 3 else rng.choice([1, 2])
    max_parts = 2 if depth == 2 else 3
    agents = "".join(f"agent(a{k}).\n" for k in range(n_agents))
    states = (
        "initially(n(0)).\n"
        "initially(payoff(A, 0)) :- role(A, r).\n"
        f"terminal :- n(N), N >= {depth}.\n"
        "incompatible(n(_), L) :- member(n(_), L).\n"
        "incompatible(payoff(A, _), L) :- member(payoff(A, _), L).\n"
        "incompatible(flag(A), L) :- member(~flag(A), L).\n"
        "incompatible(~flag(A), L) :- member(flag(A), L).\n"
    )
    rules = [
        "rule(g, boundary, 0, if agent(A) then participates(A) where []).",
        "rule(g, position, 0, if participates(A) then role(A, r) where []).",
    ]
    grants, bans = [], []
    for j, a in enumerate(actions):
        prio = 0 if j == 0 else rng.choice([0, 0, 1, 2])
        grants.append((a, prio))
        rules.append(f"rule(g, choice, {prio}, if role(A, r) then can(A, {a}) where []).")
    for a in actions[1:]:
        if rng.random() < 0.4:
            prio = rng.choice([0, 1, 2])
            min_n = rng.choice([0, 1])
            bans.append((a, prio, min_n))
            rules.append(f"rule(g, choice, {prio}, if role(A, r) then ~can(A, {a}) where [n(N), N >= {min_n}]).")
    rules.append("rule(g, control, 0, if does(A, _) then [n(M) withProb 1] where [n(N), {M = N + 1}]).")
    for a in actions:
        parts = _prob_split(rng, max_parts)
        items = []
        for k, p in enumerate(parts):
            items.append(f"payoff(A, Y{k}) withProb {p.numerator}/{p.denominator}")
        cons = ", ".join(f"{{Y{k} = X + {rng.randint(-3, 6)}}}" for k in range(len(parts)))
        rules.append(f"rule(g, control, 0, if does(A, {a}) then [{', '.join(items)}] where [payoff(A, X), {cons}]).")
    if n_agents >= 2 and rng.random() < 0.5:
        a = rng.choice(actions)
        rules.append(f"rule(g, control, 0, if does(A, {a}) and does(B, {a}) then "
                     f"[flag(A) withProb 1/2, ~flag(A) withProb 1/2] where [A @< B]).")
    thres = rng.choice([0, 1, 2])
    return RandomDescription(agents, states, "\n".join(rules) + "\n", n_agents, actions, grants, bans, thres)
