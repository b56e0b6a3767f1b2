"""Rule activation and consequence processing."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .description import RuleStatement
from .engine import KnowledgeBase, Substitution, evaluate, flatten_conjunction, normalize, substitute
from .errors import (
    DegenerateDistribution,
    InstantiationError,
    JointActionViolation,
    LogicError,
    RuleActivationError,
)
from .terms import (
    Num,
    Struct,
    Sym,
    Term,
    complement,
    format_term,
    is_ground,
    is_overwrite,
    list_items,
    make_list,
    order_key,
)

trace = logging.getLogger("aslgames.trace")

INF = math.inf


@dataclass(frozen=True)
class ControlBranch:
    fluents: tuple[Term, ...]
    prob: Fraction


@dataclass(frozen=True)
class ActivatedRule:
    priority: int
    consequence: Term  # grounded consequence term, as written in the rule
    rule: RuleStatement = field(compare=False)
    substitution: Substitution = field(compare=False, default_factory=dict)

    @property
    def branches(self) -> tuple[ControlBranch, ...]:
        """The grounded ``withProb`` list of a control rule."""
        out = []
        for item in list_items(self.consequence) or []:
            fluents = tuple(flatten_conjunction(item.args[0], ("and",)))
            out.append(ControlBranch(fluents, item.args[1].value))
        return tuple(out)


@dataclass(frozen=True)
class NextStates:
    """Distribution over next states; ``states[i]`` has probability ``probs[i]``."""

    states: tuple[tuple[Term, ...], ...]
    probs: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.states)

    def items(self):
        return zip(self.states, self.probs)


def _rules(kb: KnowledgeBase) -> list[RuleStatement]:
    return getattr(kb, "rules", [])


def _id_matches(rule_id: Term, wanted: object) -> bool:
    if wanted is None:
        return True
    if isinstance(wanted, str):
        return isinstance(rule_id, Sym) and rule_id.name == wanted
    return rule_id == wanted


def _ground_probabilities(conseq: Term, s: Substitution) -> Term:
    """Evaluate each ``withProb`` probability to an exact number."""
    items = list_items(conseq)
    out = []
    for item in items:
        p = evaluate(item.args[1], s)
        out.append(Struct("withProb", (substitute(item.args[0], s), Num(p))))
    return make_list(out)


def query_rule(kb: KnowledgeBase, id: str | Term | None, rule_type: str,
               max_priority: float = 0) -> list[ActivatedRule]:
    """Every activation of the matching rules with priority up to ``max_priority``.

    Sorted by descending priority, then rule declaration order, then the
    standard order of the grounded consequence. Duplicate (priority,
    consequence) pairs are dropped.
    """
    found: list[tuple[int, ActivatedRule]] = []
    for rule in _rules(kb):
        if rule.type_name != rule_type or not _id_matches(rule.id, id):
            continue
        if rule.priority_value > max_priority:
            continue
        r = rule.renamed()
        goals = [r.condition] + r.constraint_goals
        try:
            for s in kb.solve_all(goals):
                if rule_type == "control":
                    conseq = _ground_probabilities(r.consequence, s)
                else:
                    conseq = substitute(r.consequence, s)
                if not is_ground(conseq):
                    raise InstantiationError(f"consequence {format_term(conseq)} is not ground")
                found.append((rule.index, ActivatedRule(rule.priority_value, conseq, rule, normalize(s))))
        except LogicError as exc:
            raise RuleActivationError(rule.label, exc) from exc

    found.sort(key=lambda pair: (-pair[1].priority, pair[0], order_key(pair[1].consequence)))
    seen: set[tuple[int, Term]] = set()
    out = []
    for _, act in found:
        key = (act.priority, act.consequence)
        if key in seen:
            continue
        seen.add(key)
        out.append(act)
        if trace.isEnabledFor(logging.DEBUG):
            trace.debug("activate %s prio=%d %s", act.rule.label, act.priority, format_term(act.consequence))
    return out


def simple_conseqs_with_origin(kb: KnowledgeBase, id: str | Term | None, rule_type: str,
                               thres: float = 0) -> list[tuple[Term, ActivatedRule]]:
    """Like :func:`get_simple_conseqs`, keeping the activation that produced each fluent."""
    if rule_type not in ("boundary", "position", "choice"):
        raise ValueError(f"not a simple rule type: {rule_type}")
    acts = query_rule(kb, id, rule_type, thres)
    # at equal priority, overwriting consequences are processed first
    acts.sort(key=lambda a: (-a.priority, not is_overwrite(a.consequence), a.rule.index,
                             order_key(a.consequence)))
    chosen: dict[Term, ActivatedRule] = {}
    for act in acts:
        f = act.consequence
        if f in chosen or complement(f) in chosen:
            if trace.isEnabledFor(logging.DEBUG):
                trace.debug("block %s from %s", format_term(f), act.rule.label)
            continue
        chosen[f] = act
    return [(f, a) for f, a in chosen.items() if not is_overwrite(f)]


def get_simple_conseqs(kb: KnowledgeBase, id: str | Term | None, rule_type: str,
                       thres: float = 0) -> list[Term]:
    """Participants, roles or available actions entailed by the simple rules."""
    return [f for f, _ in simple_conseqs_with_origin(kb, id, rule_type, thres)]


def check_incompatible(kb: KnowledgeBase, f: Term, s: Sequence[Term]) -> bool:
    return kb.succeeds(Struct("incompatible", (f, make_list(s))))


def _joint_action(kb: KnowledgeBase) -> list[Term]:
    acts = [f for f in kb.overlay_facts() if isinstance(f, Struct) and f.functor == "does" and f.arity == 2]
    agents = [a.args[0] for a in acts]
    dup = {format_term(a) for a in agents if agents.count(a) > 1}
    if dup:
        raise JointActionViolation(f"agents acting more than once in one joint action: {', '.join(sorted(dup))}")
    return acts


def get_control_conseqs(kb: KnowledgeBase, id: str | Term | None, thres: float = 0,
                        state: Iterable[Term] | None = None) -> NextStates:
    """Next-state distribution for the asserted state and joint action.

    ``state`` is the pre-transition state in insertion order; by default every
    asserted fluent that is not ``does/2`` or a staging fact.
    """
    _joint_action(kb)
    if state is None:
        staging = {"does", "participates", "role"}
        state = [f for f in kb.overlay_facts()
                 if not (isinstance(f, Struct) and f.functor in staging)]
    s_t = list(state)
    acts = query_rule(kb, id, "control", thres)
    if not acts:
        return NextStates((tuple(s_t),), (Fraction(1),))

    states: list[tuple[list[Term], Fraction]] = [([], Fraction(1))]
    for act in acts:
        branches = act.branches
        clash = next(((c, nxt) for br in branches for c in br.fluents for nxt, _ in states
                      if check_incompatible(kb, c, nxt)), None)
        if clash is not None:
            if trace.isEnabledFor(logging.DEBUG):
                trace.debug("skip %s: %s incompatible with %s", act.rule.label, format_term(clash[0]),
                            format_term(make_list(clash[1])))
            continue
        expanded = []
        for nxt, p in states:
            for br in branches:
                new = list(nxt)
                for c in br.fluents:
                    if c not in new:
                        new.append(c)
                expanded.append((new, p * br.prob))
        states = expanded

    for nxt, _ in states:
        for f in s_t:
            if f not in nxt and not check_incompatible(kb, f, nxt):
                nxt.append(f)
                if trace.isEnabledFor(logging.DEBUG):
                    trace.debug("drag %s", format_term(f))

    merged: dict[frozenset, int] = {}
    out_states: list[tuple[Term, ...]] = []
    out_probs: list[Fraction] = []
    for nxt, p in states:
        key = frozenset(nxt)
        if key in merged:
            out_probs[merged[key]] += p
        else:
            merged[key] = len(out_states)
            out_states.append(tuple(nxt))
            out_probs.append(p)
    total = sum(out_probs, Fraction(0))
    if total != 1:
        raise DegenerateDistribution(f"next-state probabilities sum to {total}, not 1")
    # children are listed last branch first
    return NextStates(tuple(reversed(out_states)), tuple(reversed(out_probs)))


__all__ = [
    "ActivatedRule", "ControlBranch", "INF", "NextStates", "check_incompatible",
    "get_control_conseqs", "get_simple_conseqs", "query_rule", "simple_conseqs_with_origin",
]
