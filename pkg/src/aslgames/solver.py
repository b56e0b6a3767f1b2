"""Utilities, per-round Nash equilibria, backtracking and outcome evaluation."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import yaml

from .engine import KnowledgeBase, unify
from .errors import AmbiguousPayoff, MissingPayoff, UnsupportedFormat, UnsupportedShape
from .game import ExtensiveGame, NormalFormGame, RoundInfo, format_state
from .parser import parse_term
from .terms import Num, Struct, Sym, Term, Var, format_term, term_vars

MixedProfile = tuple[tuple[Fraction, ...], ...]
POLICIES = ("first", "max-welfare", "all")
REPORT_SCHEMA = "aslgames.report/1"


# --- utilities ---------------------------------------------------------------

@dataclass(frozen=True)
class UtilityRule:
    kind: str  # "when": goal over terminal fluents; "action": per own move on the path
    pattern: Term
    value: Fraction
    agent_var: str = "A"


@dataclass
class UtilitySpec:
    mode: str = "payoff"  # "payoff" reads payoff(Agent, X); "criteria" applies ``rules``
    rules: list[UtilityRule] = field(default_factory=list)


@dataclass(frozen=True)
class Criterion:
    name: str
    kind: str  # event, utility, utilitarian, egalitarian, constant
    arg: object = None


def to_fraction(value: object) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def _bind_agent(term: Term, var_name: str, agent: Term) -> dict:
    return {v: agent for v in term_vars(term) if v.name == var_name}


def _payoff_utility(game: ExtensiveGame, z: int) -> tuple[Fraction, ...]:
    fluents = game.annotation.fluents.get(z, ())
    out = []
    for player in game.players:
        vals = [f.args[1] for f in fluents
                if isinstance(f, Struct) and f.functor == "payoff" and f.arity == 2
                and format_term(f.args[0]) == player]
        if not vals:
            raise MissingPayoff(f"terminal {z} has no payoff fluent for {player}")
        if len(vals) > 1:
            raise AmbiguousPayoff(f"terminal {z} has {len(vals)} payoff fluents for {player}")
        if not isinstance(vals[0], Num):
            raise MissingPayoff(f"terminal {z}: payoff for {player} is not a number")
        out.append(vals[0].value)
    return tuple(out)


def _criteria_utility(game: ExtensiveGame, z: int, spec: UtilitySpec, kb: KnowledgeBase) -> tuple[Fraction, ...]:
    fluents = game.annotation.fluents.get(z, ())
    path = game.path(z)
    moves = [(game.turn[a], game.label[b]) for a, b in zip(path, path[1:]) if b in game.label]
    out = []
    with kb.assumed(fluents):
        for player in game.players:
            agent = parse_term(player)
            total = Fraction(0)
            for rule in spec.rules:
                s = _bind_agent(rule.pattern, rule.agent_var, agent)
                if rule.kind == "when":
                    if kb.succeeds(rule.pattern, s):
                        total += rule.value
                else:
                    for mover, action in moves:
                        if mover == player and unify(rule.pattern, action, s) is not None:
                            total += rule.value
            out.append(total)
    return tuple(out)


def assign_utilities(game: ExtensiveGame, spec: UtilitySpec | None = None,
                     kb: KnowledgeBase | None = None) -> ExtensiveGame:
    """Attach a utility vector (ordered like ``game.players``) to every terminal."""
    spec = spec or UtilitySpec()
    if spec.mode == "criteria" and kb is None:
        kb = KnowledgeBase(dynamic=_fluent_keys(game))
    utilities = {}
    for z in game.terminals:
        if spec.mode == "payoff":
            utilities[z] = _payoff_utility(game, z)
        elif spec.mode == "criteria":
            utilities[z] = _criteria_utility(game, z, spec, kb)
        else:
            raise ValueError(f"unknown utility mode {spec.mode!r}")
    game.utilities = utilities
    return game


def _fluent_keys(game: ExtensiveGame) -> set[tuple[str, int]]:
    keys = set()
    for state in game.annotation.fluents.values():
        for f in state:
            if isinstance(f, Struct):
                keys.add((f.functor, f.arity))
            elif isinstance(f, Sym):
                keys.add((f.name, 0))
    return keys


def load_criteria_file(path: str | Path) -> tuple[UtilitySpec, list[Criterion]]:
    """Read a YAML file with optional ``utilities`` and ``criteria`` sections."""
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    return parse_criteria(data)


def parse_criteria(data: Mapping) -> tuple[UtilitySpec, list[Criterion]]:
    rules = []
    for item in data.get("utilities", []) or []:
        kind = "when" if "when" in item else "action" if "action" in item else None
        if kind is None:
            raise ValueError(f"utility entry needs 'when' or 'action': {item}")
        rules.append(UtilityRule(kind, parse_term(str(item[kind])), to_fraction(item["value"]),
                                 str(item.get("agent", "A"))))
    criteria = []
    for name, body in (data.get("criteria", {}) or {}).items():
        if isinstance(body, str):
            body = {body: None}
        if "event" in body:
            criteria.append(Criterion(name, "event", parse_term(str(body["event"]))))
        elif "utility" in body:
            criteria.append(Criterion(name, "utility", str(body["utility"])))
        elif "constant" in body:
            criteria.append(Criterion(name, "constant", to_fraction(body["constant"])))
        elif "utilitarian" in body:
            criteria.append(Criterion(name, "utilitarian"))
        elif "egalitarian" in body:
            criteria.append(Criterion(name, "egalitarian"))
        else:
            raise ValueError(f"criterion {name!r} has no recognized kind")
    return UtilitySpec("criteria" if rules else "payoff", rules), criteria


# --- normal form and equilibria ------------------------------------------------

def round_to_normal_form(game: ExtensiveGame, info: RoundInfo,
                         values: Mapping[int, tuple[Fraction, ...]] | None = None) -> NormalFormGame:
    """Normal form of an embedded round; chance nodes become expected values.

    ``values`` gives the payoff vector at round leaves (defaults to the
    game's terminal utilities).
    """
    values = values if values is not None else (game.utilities or {})
    sets = [game.infosets[w] for w in info.infosets]
    players = [w.player for w in sets]
    actions = [w.actions for w in sets]
    index = [game.players.index(p) for p in players]
    payoffs, outcomes = {}, {}
    for profile in itertools.product(*(range(len(a)) for a in actions)):
        node = info.root
        for w, i in zip(sets, profile):
            node = game.children[node][i]
        full = _leaf_value(game, node, values)
        outcomes[profile] = full
        payoffs[profile] = tuple(full[k] for k in index)
    return NormalFormGame(players, actions, payoffs, outcomes)


def _leaf_value(game: ExtensiveGame, node: int, values: Mapping[int, tuple[Fraction, ...]]) -> tuple[Fraction, ...]:
    if game.is_chance(node):
        n = len(game.players)
        acc = [Fraction(0)] * n
        for c in game.children[node]:
            p = game.chance_prob[c]
            for k, v in enumerate(values[c]):
                acc[k] += p * v
        return tuple(acc)
    return tuple(values[node])


def expected_payoffs(g: NormalFormGame, profile: MixedProfile, full: bool = False) -> tuple[Fraction, ...]:
    """Expected payoff per mover, or of the full outcome vectors when ``full``."""
    table = g.outcomes if full and g.outcomes is not None else g.payoffs
    n = len(next(iter(table.values())))
    acc = [Fraction(0)] * n
    supports = [[(i, p) for i, p in enumerate(dist) if p] for dist in profile]
    for combo in itertools.product(*supports):
        prob = Fraction(1)
        for _, p in combo:
            prob *= p
        cell = table[tuple(i for i, _ in combo)]
        for k in range(n):
            acc[k] += prob * cell[k]
    return tuple(acc)


def _pure(n: int, i: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(k == i)) for k in range(n))


def is_equilibrium(g: NormalFormGame, profile: MixedProfile) -> bool:
    """No player gains from a unilateral pure deviation (exact)."""
    base = expected_payoffs(g, profile)
    for k, acts in enumerate(g.actions):
        for i in range(len(acts)):
            dev = list(profile)
            dev[k] = _pure(len(acts), i)
            if expected_payoffs(g, tuple(dev))[k] > base[k]:
                return False
    return True


def _solve_square(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square system by Gauss-Jordan elimination, or None."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def _vertices(constraints: list[tuple[list[Fraction], Fraction, int]], dim: int) -> list[tuple[tuple[Fraction, ...], frozenset]]:
    """Nonzero vertices of {v : a.v <= b} with their tight-constraint labels."""
    found: dict[tuple[Fraction, ...], frozenset] = {}
    for chosen in itertools.combinations(range(len(constraints)), dim):
        sol = _solve_square([constraints[c][0] for c in chosen], [constraints[c][1] for c in chosen])
        if sol is None or all(v == 0 for v in sol):
            continue
        ok, labels = True, set()
        for coeffs, bound, label in constraints:
            lhs = sum((a * v for a, v in zip(coeffs, sol)), Fraction(0))
            if lhs > bound:
                ok = False
                break
            if lhs == bound:
                labels.add(label)
        if ok:
            found[tuple(sol)] = frozenset(labels)
    return list(found.items())


def _bimatrix_equilibria(A: list[list[Fraction]], B: list[list[Fraction]]) -> list[MixedProfile]:
    m, n = len(A), len(A[0])
    shift_a = 1 - min(min(r) for r in A)
    shift_b = 1 - min(min(r) for r in B)
    Ap = [[v + shift_a for v in r] for r in A]
    Bp = [[v + shift_b for v in r] for r in B]
    one, zero = Fraction(1), Fraction(0)
    # P = {x >= 0, B'^T x <= 1}: label i when x_i = 0, m+j when column j is a best response
    p_cons = [([-one if k == i else zero for k in range(m)], zero, i) for i in range(m)]
    p_cons += [([Bp[i][j] for i in range(m)], one, m + j) for j in range(n)]
    # Q = {A' y <= 1, y >= 0}: label i when row i is a best response, m+j when y_j = 0
    q_cons = [([Ap[i][j] for j in range(n)], one, i) for i in range(m)]
    q_cons += [([-one if k == j else zero for k in range(n)], zero, m + j) for j in range(n)]
    everything = frozenset(range(m + n))
    out = []
    q_vertices = _vertices(q_cons, n)
    for x, lx in _vertices(p_cons, m):
        for y, ly in q_vertices:
            if lx | ly == everything:
                sx, sy = sum(x), sum(y)
                out.append((tuple(v / sx for v in x), tuple(v / sy for v in y)))
    return out


def _binary_equilibria(g: NormalFormGame, strategic: list[int]) -> list[MixedProfile]:
    """Equilibria for three or more strategic players with two actions each."""
    import sympy

    k = len(g.players)
    out = []
    for kinds in itertools.product(("0", "1", "mix"), repeat=len(strategic)):
        symbols = {}
        for pl, kind in zip(strategic, kinds):
            if kind == "mix":
                symbols[pl] = sympy.Symbol(f"p{pl}")

        def prob_expr(pl: int, action: int):
            if pl not in strategic:
                return sympy.Integer(1) if action == 0 else sympy.Integer(0)
            kind = kinds[strategic.index(pl)]
            if kind == "mix":
                return symbols[pl] if action == 0 else 1 - symbols[pl]
            return sympy.Integer(int(int(kind) == action))

        def utility(pl: int, fixed_action: int):
            total = sympy.Integer(0)
            for cell, payoff in g.payoffs.items():
                if cell[pl] != fixed_action:
                    continue
                w = sympy.Integer(1)
                for other in range(k):
                    if other != pl:
                        w *= prob_expr(other, cell[other])
                total += w * sympy.Rational(payoff[pl].numerator, payoff[pl].denominator)
            return total

        eqs = [sympy.expand(utility(pl, 0) - utility(pl, 1)) for pl in symbols]
        if symbols:
            sols = sympy.solve(eqs, list(symbols.values()), dict=True)
        else:
            sols = [{}]
        for sol in sols:
            values = {}
            for pl, sym in symbols.items():
                if sym not in sol:
                    break  # a continuum of solutions; its isolated points are found elsewhere
                v = sympy.nsimplify(sol[sym])
                if v.free_symbols:
                    break
                if not v.is_real:
                    break
                if not v.is_rational:
                    raise UnsupportedShape("equilibrium with irrational probabilities")
                q = Fraction(int(v.p), int(v.q))
                if not 0 < q < 1:
                    break
                values[pl] = q
            else:
                profile = []
                for pl in range(k):
                    if pl in values:
                        profile.append((values[pl], 1 - values[pl]))
                    elif pl in strategic:
                        kind = kinds[strategic.index(pl)]
                        profile.append(_pure(2, int(kind)))
                    else:
                        profile.append((Fraction(1),))
                profile = tuple(profile)
                if is_equilibrium(g, profile):
                    out.append(profile)
    if not out:
        raise UnsupportedShape("no isolated equilibrium found for this multi-player round")
    return out


def _support_key(profile: MixedProfile) -> tuple:
    return (tuple(tuple(i for i, p in enumerate(d) if p) for d in profile), profile)


def nash_equilibria(g: NormalFormGame) -> list[MixedProfile]:
    """All extreme Nash equilibria, deduplicated and sorted by support then probabilities.

    Players with a single action are not strategic. One strategic player
    yields the argmax pure profiles; two are solved by vertex enumeration of
    the best-response polytopes; three or more are supported when each has at
    most two actions.
    """
    sizes = [len(a) for a in g.actions]
    if any(s == 0 for s in sizes):
        raise UnsupportedShape("a player has no actions")
    strategic = [k for k, s in enumerate(sizes) if s > 1]
    fixed = [(Fraction(1),)] * len(sizes)

    if not strategic:
        found = [tuple(fixed)]
    elif len(strategic) == 1:
        k = strategic[0]
        vals = []
        for i in range(sizes[k]):
            cell = [0] * len(sizes)
            cell[k] = i
            vals.append(g.payoffs[tuple(cell)][k])
        best = max(vals)
        found = []
        for i, v in enumerate(vals):
            if v == best:
                prof = list(fixed)
                prof[k] = _pure(sizes[k], i)
                found.append(tuple(prof))
    elif len(strategic) == 2:
        a, b = strategic
        A, B = [], []
        for i in range(sizes[a]):
            ra, rb = [], []
            for j in range(sizes[b]):
                cell = [0] * len(sizes)
                cell[a], cell[b] = i, j
                payoff = g.payoffs[tuple(cell)]
                ra.append(payoff[a])
                rb.append(payoff[b])
            A.append(ra)
            B.append(rb)
        found = []
        for x, y in _bimatrix_equilibria(A, B):
            prof = list(fixed)
            prof[a], prof[b] = x, y
            found.append(tuple(prof))
    elif all(sizes[k] == 2 for k in strategic):
        found = _binary_equilibria(g, strategic)
    else:
        raise UnsupportedShape(
            f"round with {len(strategic)} strategic players and action counts {sizes} is not supported")

    unique = sorted(set(found), key=_support_key)
    return unique


# --- backtracking -------------------------------------------------------------

@dataclass
class RoundEquilibria:
    root: int
    players: list[str]
    actions: list[tuple[Term, ...]]
    infosets: tuple[int, ...]
    equilibria: list[MixedProfile]
    selected: int

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "players": self.players,
            "infosets": list(self.infosets),
            "actions": [[format_term(a) for a in acts] for acts in self.actions],
            "equilibria": [[[_frac(p) for p in d] for d in eq] for eq in self.equilibria],
            "selected": self.selected,
        }


@dataclass
class SolveReport:
    profile: dict[int, tuple[Fraction, ...]]
    node_values: dict[int, tuple[Fraction, ...]]
    outcome_dist: dict[int, Fraction]
    equilibria_per_round: list[RoundEquilibria]
    criterion_expectations: dict[str, Fraction] = field(default_factory=dict)
    policy: str = "first"
    alternatives: list["SolveReport"] = field(default_factory=list)
    truncated: bool = False
    root: int = 1

    @property
    def root_value(self) -> tuple[Fraction, ...]:
        return self.node_values[self.root]


@dataclass
class _Alt:
    value: tuple[Fraction, ...]
    profile: dict[int, tuple[Fraction, ...]]
    rounds: list[RoundEquilibria]


def _select(eqs: list[MixedProfile], g: NormalFormGame, policy: str) -> list[int]:
    if policy == "first":
        return [0]
    if policy == "max-welfare":
        welfare = [sum(expected_payoffs(g, e, full=True)) for e in eqs]
        return [welfare.index(max(welfare))]
    if policy == "all":
        return list(range(len(eqs)))
    raise ValueError(f"unknown selection policy {policy!r}; use one of {', '.join(POLICIES)}")


def backtrack_solve(game: ExtensiveGame, selection: str = "first", max_alternatives: int = 512) -> SolveReport:
    """Solve rounds deepest first and propagate values to the root.

    With ``selection="all"`` every combination of per-round equilibria is
    kept (up to ``max_alternatives``); the first is returned as the main
    report and all of them in ``alternatives``.
    """
    if game.utilities is None:
        raise MissingPayoff("assign utilities before solving")
    if selection not in POLICIES:
        raise ValueError(f"unknown selection policy {selection!r}; use one of {', '.join(POLICIES)}")
    round_at = {r.root: r for r in game.rounds}
    alts: dict[int, list[_Alt]] = {}
    truncated = False
    for info in reversed(game.rounds):
        child_roots = [z for z in info.leaves if z in round_at]
        options = [alts[c] for c in child_roots]
        results: list[_Alt] = []
        for combo in itertools.product(*options):
            values = {z: game.utilities[z] for z in info.leaves if z not in round_at}
            profile: dict[int, tuple[Fraction, ...]] = {}
            rounds: list[RoundEquilibria] = []
            for c, alt in zip(child_roots, combo):
                values[c] = alt.value
                profile.update(alt.profile)
                rounds.extend(alt.rounds)
            nfg = round_to_normal_form(game, info, values)
            try:
                eqs = nash_equilibria(nfg)
            except UnsupportedShape as exc:
                raise UnsupportedShape(f"round rooted at node {info.root}: {exc}") from exc
            for idx in _select(eqs, nfg, selection):
                prof = dict(profile)
                for w, dist in zip(info.infosets, eqs[idx]):
                    prof[w] = dist
                entry = RoundEquilibria(info.root, nfg.players, nfg.actions, info.infosets, eqs, idx)
                results.append(_Alt(expected_payoffs(nfg, eqs[idx], full=True), prof, rounds + [entry]))
                if len(results) >= max_alternatives:
                    truncated = True
                    break
            if len(results) >= max_alternatives:
                break
        alts[info.root] = results

    if game.root in alts:
        root_alts = alts[game.root]
    else:
        root_alts = [_Alt(game.utilities[game.root], {}, [])]
    reports = [_report(game, alt, selection) for alt in root_alts]
    main = reports[0]
    main.truncated = truncated
    if selection == "all":
        main.alternatives = reports
    return main


def _report(game: ExtensiveGame, alt: _Alt, policy: str) -> SolveReport:
    n = len(game.players)
    values: dict[int, tuple[Fraction, ...]] = {}

    def value(x: int) -> tuple[Fraction, ...]:
        if x in values:
            return values[x]
        kids = game.children[x]
        if not kids:
            v = tuple(game.utilities[x])
        else:
            if game.is_chance(x):
                weights = [game.chance_prob[c] for c in kids]
            else:
                weights = list(alt.profile[game.node_infoset[x]])
            acc = [Fraction(0)] * n
            for c, p in zip(kids, weights):
                if p:
                    for k, u in enumerate(value(c)):
                        acc[k] += p * u
            v = tuple(acc)
        values[x] = v
        return v

    order = list(game.walk())
    for x in reversed(order):
        value(x)
    reach = {game.root: Fraction(1)}
    for x in order:
        kids = game.children[x]
        if not kids:
            continue
        weights = ([game.chance_prob[c] for c in kids] if game.is_chance(x)
                   else list(alt.profile[game.node_infoset[x]]))
        for c, p in zip(kids, weights):
            reach[c] = reach[x] * p
    dist = {z: reach[z] for z in game.terminals}
    rounds = sorted(alt.rounds, key=lambda r: r.root)
    return SolveReport(dict(alt.profile), dict(sorted(values.items())), dist, rounds, policy=policy,
                       root=game.root)


# --- criteria -------------------------------------------------------------------

def evaluate_criteria(report: SolveReport, criteria: Iterable[Criterion], game: ExtensiveGame,
                      kb: KnowledgeBase | None = None) -> dict[str, Fraction]:
    """Expected value of each criterion under the report's outcome distribution."""
    criteria = list(criteria)
    if kb is None:
        kb = KnowledgeBase(dynamic=_fluent_keys(game))
    out: dict[str, Fraction] = {}
    for c in criteria:
        total = Fraction(0)
        for z, p in report.outcome_dist.items():
            if p:
                total += p * _criterion_value(c, z, game, kb)
        out[c.name] = total
    report.criterion_expectations.update(out)
    for alt in report.alternatives:
        if alt is not report:
            evaluate_criteria(alt, criteria, game, kb)
    return out


def _criterion_value(c: Criterion, z: int, game: ExtensiveGame, kb: KnowledgeBase) -> Fraction:
    if c.kind == "constant":
        return Fraction(c.arg)
    if c.kind == "event":
        goal = c.arg
        if not kb.knows(_key(goal)) and goal_is_fluent(goal):
            kb.dynamic.add(_key(goal))
        with kb.assumed(game.annotation.fluents.get(z, ())):
            return Fraction(int(kb.succeeds(goal)))
    u = game.utilities[z]
    if c.kind == "utility":
        return u[game.players.index(c.arg)]
    if c.kind == "utilitarian":
        return sum(u, Fraction(0))
    if c.kind == "egalitarian":
        return min(u)
    raise ValueError(f"unknown criterion kind {c.kind!r}")


def _key(goal: Term) -> tuple[str, int]:
    if isinstance(goal, Struct):
        return goal.functor, goal.arity
    if isinstance(goal, Sym):
        return goal.name, 0
    return ("", 0)


def goal_is_fluent(goal: Term) -> bool:
    return isinstance(goal, (Struct, Sym)) and _key(goal)[0] not in (",", ";", "\\+", "and")


# --- report rendering ---------------------------------------------------------------

def _frac(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


def decimal(q: Fraction, places: int = 2) -> str:
    return f"{float(q):.{places}f}"


def report_to_json(report: SolveReport, game: ExtensiveGame) -> dict:
    def one(r: SolveReport) -> dict:
        return {
            "policy": r.policy,
            "profile": {str(w): [_frac(p) for p in d] for w, d in sorted(r.profile.items())},
            "root_value": dict(zip(game.players, (_frac(v) for v in r.node_values[game.root]))),
            "outcome_dist": {str(z): _frac(p) for z, p in sorted(r.outcome_dist.items())},
            "criteria": {k: _frac(v) for k, v in r.criterion_expectations.items()},
            "rounds": [e.to_json() for e in r.equilibria_per_round],
        }

    data = {"schema": REPORT_SCHEMA, "players": list(game.players), **one(report)}
    if report.alternatives:
        data["alternatives"] = [one(a) for a in report.alternatives]
    if report.truncated:
        data["truncated"] = True
    return data


def outcome_rows(report: SolveReport, game: ExtensiveGame) -> list[tuple[int, str, str]]:
    """(node, fluents, probability) for every state node; '-' for non-terminals."""
    rows = []
    for x in game.nodes:
        if x not in game.annotation.fluents:
            continue
        p = decimal(report.outcome_dist[x]) if x in report.outcome_dist else "-"
        rows.append((x, format_state(game.annotation.fluents[x]), p))
    return rows


def report_table(report: SolveReport, game: ExtensiveGame) -> str:
    rows = outcome_rows(report, game)
    width = max([len(r[1]) for r in rows] + [12])
    lines = [f"{'node':>5}  {'state fluents':<{width}}  p"]
    for x, fl, p in rows:
        lines.append(f"{x:>5}  {fl:<{width}}  {p}")
    if report.criterion_expectations:
        lines.append("")
        for k, v in report.criterion_expectations.items():
            lines.append(f"{k}: {decimal(v, 4)} ({v})")
    return "\n".join(lines) + "\n"


def render_report(report: SolveReport, game: ExtensiveGame, format: str = "json") -> str:
    if format == "json":
        return json.dumps(report_to_json(report, game), indent=2) + "\n"
    if format == "table":
        out = report_table(report, game)
        for i, alt in enumerate(report.alternatives[1:], start=1):
            out += f"\n# equilibrium combination {i}\n" + report_table(alt, game)
        return out
    raise UnsupportedFormat(f"unsupported report format {format!r}; use json or table")


__all__ = [
    "Criterion", "MixedProfile", "NormalFormGame", "POLICIES", "RoundEquilibria", "SolveReport",
    "UtilityRule", "UtilitySpec", "assign_utilities", "backtrack_solve", "evaluate_criteria",
    "expected_payoffs", "is_equilibrium", "load_criteria_file", "nash_equilibria", "outcome_rows",
    "parse_criteria", "render_report", "report_table", "report_to_json", "round_to_normal_form",
]
