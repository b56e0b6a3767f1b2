"""ASL descriptions: the agents, states and rules bases, validity checks, lowering."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .engine import Clause, KnowledgeBase, flatten_conjunction, unify
from .errors import AslSyntaxError, InvalidDescription
from .parser import parse_clauses
from .terms import (
    Num,
    Struct,
    Sym,
    Term,
    Var,
    complement,
    format_term,
    indicator,
    is_overwrite,
    list_items,
    make_list,
    rename,
    term_vars,
)

RULE_TYPES = ("boundary", "position", "choice", "control")
BASES = ("agents", "states", "rules")

RESERVED = {
    ("agent", 1), ("participates", 1), ("role", 2), ("can", 2), ("does", 2),
    ("initially", 1), ("terminal", 0), ("incompatible", 2), ("rule", 4),
}
HEAD_BASE = {
    ("agent", 1): "agents",
    ("initially", 1): "states",
    ("terminal", 0): "states",
    ("incompatible", 2): "states",
    ("rule", 4): "rules",
}
# fluents only ever asserted by the engine, never defined by clauses
ENGINE_ONLY = {("participates", 1), ("role", 2), ("can", 2), ("does", 2)}

# condition functor and consequence functor per simple rule type
SIMPLE_SHAPES = {
    "boundary": (("agent", 1), ("participates", 1)),
    "position": (("participates", 1), ("role", 2)),
    "choice": (("role", 2), ("can", 2)),
}


@dataclass(frozen=True)
class Location:
    file: str
    line: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}"


@dataclass(frozen=True)
class Branch:
    fluents: tuple[Term, ...]
    prob: Term


@dataclass(frozen=True)
class RuleStatement:
    id: Term
    rule_type: Term
    priority: Term
    condition: Term
    consequence: Term
    constraints: Term
    index: int = 0
    location: Location | None = None

    @property
    def type_name(self) -> str:
        return self.rule_type.name if isinstance(self.rule_type, Sym) else str(self.rule_type)

    @property
    def priority_value(self) -> int:
        return int(self.priority.value)

    @property
    def label(self) -> str:
        where = f" at {self.location}" if self.location else ""
        return f"#{self.index} ({format_term(self.id)}, {self.type_name}, {format_term(self.priority)}){where}"

    @property
    def constraint_goals(self) -> list[Term]:
        return list_items(self.constraints) or []

    @property
    def branches(self) -> list[Branch]:
        """Control-rule consequence list as ``Branch`` objects."""
        out = []
        for item in list_items(self.consequence) or []:
            if isinstance(item, Struct) and item.functor == "withProb" and item.arity == 2:
                out.append(Branch(tuple(flatten_conjunction(item.args[0], ("and",))), item.args[1]))
        return out

    def to_term(self) -> Term:
        body = Struct("if_then_where", (self.condition, self.consequence, self.constraints))
        return Struct("rule", (self.id, self.rule_type, self.priority, body))

    def renamed(self) -> "RuleStatement":
        mapping: dict[Var, Var] = {}
        return RuleStatement(
            self.id, self.rule_type, self.priority,
            rename(self.condition, mapping), rename(self.consequence, mapping),
            rename(self.constraints, mapping), self.index, self.location,
        )

    def __str__(self) -> str:
        return format_term(self.to_term(), 1199) + "."


@dataclass
class AslDescription:
    agents_base: list[Clause] = field(default_factory=list)
    states_base: list[Clause] = field(default_factory=list)
    rules_base: list[RuleStatement] = field(default_factory=list)
    source_map: dict[int, Location] = field(default_factory=dict)  # id(clause) -> location
    misplaced: list[tuple[str, Clause, Location]] = field(default_factory=list)
    malformed_rules: list[tuple[Clause, Location]] = field(default_factory=list)

    def location(self, clause: Clause) -> Location | None:
        return self.source_map.get(id(clause))

    def rule_ids(self) -> list[Term]:
        seen: list[Term] = []
        for r in self.rules_base:
            if r.id not in seen:
                seen.append(r.id)
        return seen

    def structure(self) -> tuple:
        """Alpha-normalized structure, for comparing descriptions."""
        return (
            tuple(_canon_clause(c) for c in self.agents_base),
            tuple(_canon_clause(c) for c in self.states_base),
            tuple(_canon_term(r.to_term()) for r in self.rules_base),
        )


def _canon_term(term: Term, mapping: dict[Var, Var] | None = None) -> Term:
    mapping = {} if mapping is None else mapping
    for v in term_vars(term):
        if v not in mapping:
            mapping[v] = Var(f"V{len(mapping)}")
    return _apply(term, mapping)


def _apply(term: Term, mapping: dict[Var, Var]) -> Term:
    if isinstance(term, Var):
        return mapping[term]
    if isinstance(term, Struct):
        return Struct(term.functor, tuple(_apply(a, mapping) for a in term.args))
    return term


def _canon_clause(c: Clause) -> tuple:
    mapping: dict[Var, Var] = {}
    return (_canon_term(c.head, mapping), tuple(_canon_term(g, mapping) for g in c.body))


# --- parsing ----------------------------------------------------------------

def _rule_from_clause(clause: Clause, index: int, loc: Location) -> RuleStatement | None:
    head = clause.head
    if not (isinstance(head, Struct) and head.functor == "rule" and head.arity == 4):
        return None
    body = head.args[3]
    if not (isinstance(body, Struct) and body.functor == "if_then_where" and body.arity == 3):
        return None
    return RuleStatement(head.args[0], head.args[1], head.args[2], *body.args, index=index, location=loc)


def parse_description(sources: Mapping[str, str] | None = None, *, names: Mapping[str, str] | None = None,
                      **kw: str) -> AslDescription:
    """Parse named texts into an :class:`AslDescription`.

    ``sources`` maps a base name (``agents``, ``states``, ``rules``) or
    ``description`` (everything in one text) to clause text. Clauses are placed
    by their head predicate; the file they came from only matters for
    diagnostics. Raises :class:`AslSyntaxError` on malformed text.
    """
    sources = dict(sources or {}, **kw)
    names = dict(names or {})
    unknown = set(sources) - set(BASES) - {"description"}
    if unknown:
        raise ValueError(f"unknown source kinds: {sorted(unknown)}")
    desc = AslDescription()
    parsed: list[tuple[str, Clause, Location]] = []
    for kind in ("agents", "states", "rules", "description"):
        if kind not in sources:
            continue
        fname = names.get(kind, f"<{kind}>")
        for clause, line in parse_clauses(sources[kind], fname):
            parsed.append((kind, clause, Location(fname, line)))

    agent_names = {c.head.args[0] for _, c, _ in parsed
                   if isinstance(c.head, Struct) and indicator(c.head) == ("agent", 1)}
    for kind, clause, loc in parsed:
        key = indicator(clause.head)
        base = HEAD_BASE.get(key)
        if base is None:
            if kind in BASES and kind != "rules":
                base = kind
            elif (isinstance(clause.head, Struct) and clause.head.args[0] in agent_names
                  and kind == "description"):
                base = "agents"
            else:
                base = "states"
        if kind in BASES and kind != base:
            desc.misplaced.append((kind, clause, loc))
        desc.source_map[id(clause)] = loc
        if base == "agents":
            desc.agents_base.append(clause)
        elif base == "states":
            desc.states_base.append(clause)
        else:
            rule = _rule_from_clause(clause, len(desc.rules_base), loc) if clause.is_fact else None
            if rule is None:
                desc.malformed_rules.append((clause, loc))
            else:
                desc.rules_base.append(rule)
    return desc


def load_description(agents: str | Path | None = None, states: str | Path | None = None,
                     rules: str | Path | None = None, description: str | Path | None = None) -> AslDescription:
    """Read description files from disk (three bases, or one combined file)."""
    sources, names = {}, {}
    for kind, path in (("agents", agents), ("states", states), ("rules", rules), ("description", description)):
        if path is not None:
            path = Path(path)
            sources[kind] = path.read_text(encoding="utf-8")
            names[kind] = str(path)
    if not sources:
        raise ValueError("no description files given")
    return parse_description(sources, names=names)


def load_directory(path: str | Path) -> AslDescription:
    """Load ``agents.asl``, ``states.asl`` and ``rules.asl`` from a directory."""
    path = Path(path)
    files = {kind: path / f"{kind}.asl" for kind in BASES}
    missing = [str(p) for p in files.values() if not p.exists()]
    if missing:
        single = path / "description.asl"
        if single.exists():
            return load_description(description=single)
        raise FileNotFoundError(f"missing description files: {', '.join(missing)}")
    return load_description(**files)


# --- validation -------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    category: str  # placement, type-shape, probability, variable-scope, conflict
    message: str
    location: Location | None = None
    rule: int | None = None
    severity: str = "error"

    def __str__(self) -> str:
        where = f"{self.location}: " if self.location else ""
        rule = f" [rule #{self.rule}]" if self.rule is not None else ""
        return f"{where}{self.severity}: {self.category}: {self.message}{rule}"

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "category": self.category,
            "message": self.message,
            "file": self.location.file if self.location else None,
            "line": self.location.line if self.location else None,
            "rule": self.rule,
        }


def _body_functors(goals: Iterable[Term]) -> set[tuple[str, int]]:
    out = set()
    stack = list(goals)
    while stack:
        g = stack.pop()
        if isinstance(g, Struct):
            out.add((g.functor, g.arity))
            if g.functor in (",", "and", "\\+", "findall", ";"):
                stack.extend(g.args)
        elif isinstance(g, Sym):
            out.add((g.name, 0))
    return out


def _is_atom(term: Term) -> bool:
    if is_overwrite(term):
        term = term.args[0]
    return isinstance(term, (Sym, Struct))


def _check_rule(rule: RuleStatement) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def err(category: str, message: str) -> None:
        diags.append(Diagnostic(category, message, rule.location, rule.index))

    if not isinstance(rule.id, Sym):
        err("type-shape", f"rule id must be a symbol, got {format_term(rule.id)}")
    if not (isinstance(rule.priority, Num) and rule.priority.value.denominator == 1
            and rule.priority.value >= 0):
        err("type-shape", f"priority must be a non-negative integer, got {format_term(rule.priority)}")
    kind = rule.type_name
    if kind not in RULE_TYPES:
        err("type-shape", f"rule type must be one of {', '.join(RULE_TYPES)}, got {kind}")
        return diags
    if list_items(rule.constraints) is None:
        err("type-shape", "constraints ('where' part) must be a list of goals")

    if kind in SIMPLE_SHAPES:
        (cf, ca), (qf, qa) = SIMPLE_SHAPES[kind]
        cond, conseq = rule.condition, rule.consequence
        if not (isinstance(cond, Struct) and (cond.functor, cond.arity) == (cf, ca)):
            err("type-shape", f"{kind} rule condition must be {cf}/{ca}, "
                              f"got {format_term(cond)}")
        inner = conseq.args[0] if is_overwrite(conseq) else conseq
        if not (isinstance(inner, Struct) and (inner.functor, inner.arity) == (qf, qa)):
            err("type-shape", f"{kind} rule consequence must be [~]{qf}/{qa}, "
                              f"got {format_term(conseq)}")
    else:
        for atom in flatten_conjunction(rule.condition, ("and",)):
            if not (isinstance(atom, Struct) and (atom.functor, atom.arity) == ("does", 2)):
                err("type-shape", f"control rule condition must be does/2 atoms joined by 'and', "
                                  f"got {format_term(atom)}")
        items = list_items(rule.consequence)
        if not items:
            err("type-shape", "control rule consequence must be a non-empty list of "
                              "'Consequence withProb P' items")
        else:
            literal, total = True, Fraction(0)
            for item in items:
                if not (isinstance(item, Struct) and item.functor == "withProb" and item.arity == 2):
                    err("type-shape", f"control consequence item must be 'C withProb P', got {format_term(item)}")
                    literal = False
                    continue
                for atom in flatten_conjunction(item.args[0], ("and",)):
                    if not _is_atom(atom):
                        err("type-shape", f"consequence {format_term(atom)} is not an atom")
                p = item.args[1]
                if isinstance(p, Num):
                    if not 0 <= p.value <= 1:
                        err("probability", f"probability {format_term(p)} is outside [0, 1]")
                    total += p.value
                else:
                    literal = False
            if literal and total != 1:
                err("probability", f"branch probabilities sum to {format_term(Num(total))}, not 1")

    # variable scope: consequence variables must be bound by condition or constraints
    bound = set(term_vars(rule.condition)) | set(term_vars(rule.constraints))
    for v in term_vars(rule.consequence):
        if v.name == "_":
            err("variable-scope", "anonymous variable in consequence can never be bound")
        elif v not in bound:
            err("variable-scope", f"variable {v.name} in consequence does not occur in "
                                  f"condition or constraints")
    return diags


def _conflict_warnings(rules: list[RuleStatement]) -> list[Diagnostic]:
    """Same-type, same-priority rules that can yield both ``f`` and ``~f``."""
    out = []
    simple = [r for r in rules if r.type_name in SIMPLE_SHAPES and isinstance(r.priority, Num)]
    for i, a in enumerate(simple):
        for b in simple[i + 1:]:
            if (a.id, a.type_name, a.priority) != (b.id, b.type_name, b.priority):
                continue
            if is_overwrite(a.consequence) == is_overwrite(b.consequence):
                continue
            ra, rb = a.renamed(), b.renamed()
            s = unify(complement(ra.consequence), rb.consequence)
            if s is not None and unify(ra.condition, rb.condition, s) is not None:
                out.append(Diagnostic(
                    "conflict",
                    f"rules #{a.index} and #{b.index} have the same type and priority but "
                    f"complementary consequences {format_term(a.consequence)} / "
                    f"{format_term(b.consequence)}; overwriting wins at equal priority",
                    b.location, b.index, "warning"))
    return out


def validate(d: AslDescription) -> list[Diagnostic]:
    """Diagnostics for ``d``; no error-severity diagnostic means ``d`` is valid."""
    diags: list[Diagnostic] = []
    for kind, clause, loc in d.misplaced:
        key = indicator(clause.head)
        if key in HEAD_BASE:
            diags.append(Diagnostic("placement", f"{key[0]}/{key[1]} clauses belong in the "
                                                 f"{HEAD_BASE[key]} base, found in the {kind} file", loc))
        elif kind == "rules":
            diags.append(Diagnostic("placement", f"only rule/4 statements belong in the rules base, "
                                                 f"got {format_term(clause.head)}", loc))
    for clause, loc in d.malformed_rules:
        if not clause.is_fact and indicator(clause.head) == ("rule", 4):
            diags.append(Diagnostic("placement", "rule statements must be facts (no body)", loc))
        elif indicator(clause.head) == ("rule", 4):
            diags.append(Diagnostic("type-shape", "rule/4 fourth argument must be "
                                                  "'if Condition then Consequence where Constraints'", loc))
        else:
            diags.append(Diagnostic("placement", f"only rule/4 statements belong in the rules base, "
                                                 f"got {format_term(clause.head)}", loc))
    for base_name, base in (("agents", d.agents_base), ("states", d.states_base)):
        for clause in base:
            loc = d.location(clause)
            key = indicator(clause.head)
            if key in ENGINE_ONLY:
                diags.append(Diagnostic("placement", f"{key[0]}/{key[1]} is reserved and cannot be "
                                                     f"defined by clauses", loc))
            if key == ("initially", 1):
                bad = _body_functors(clause.body) & {("can", 2), ("does", 2)}
                if bad:
                    diags.append(Diagnostic("placement", "initially/1 bodies may not use can/2 or does/2", loc))
            if key == ("incompatible", 2):
                first = clause.head.args[0]
                inner = first.args[0] if is_overwrite(first) else first
                if isinstance(inner, (Sym, Struct)) and indicator(inner) in RESERVED:
                    diags.append(Diagnostic("placement", f"incompatible/2 first argument may not be the "
                                                         f"reserved predicate {format_term(inner)}", loc))
            if key == ("rule", 4):
                diags.append(Diagnostic("placement", "rule/4 may only appear in the rules base", loc))
    for rule in d.rules_base:
        diags.extend(_check_rule(rule))
    diags.extend(_conflict_warnings(d.rules_base))
    return diags


def errors_only(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [x for x in diags if x.severity == "error"]


# --- lowering ---------------------------------------------------------------

def dynamic_predicates(d: AslDescription) -> set[tuple[str, int]]:
    """Predicates that may be queried before any clause or fact defines them."""
    out = set(RESERVED) | {("~", 1)}

    def add_fluent(t: Term) -> None:
        if is_overwrite(t):
            t = t.args[0]
        if isinstance(t, (Sym, Struct)):
            out.add(indicator(t))

    for clause in d.states_base:
        if indicator(clause.head) in (("initially", 1), ("incompatible", 2)):
            add_fluent(clause.head.args[0])
    for rule in d.rules_base:
        if rule.type_name == "control":
            for br in rule.branches:
                for f in br.fluents:
                    add_fluent(f)
        elif rule.type_name in SIMPLE_SHAPES:
            add_fluent(rule.consequence)
    return out


class DescriptionKB(KnowledgeBase):
    """Knowledge base lowered from a description; keeps the rule statements."""

    description: AslDescription
    rules: list[RuleStatement]


def lower(d: AslDescription, seed: int = 0, check: bool = True) -> DescriptionKB:
    """Load a (valid) description into a knowledge base, preserving clause order."""
    if check:
        problems = errors_only(validate(d))
        if problems:
            raise InvalidDescription(problems)
    clauses = list(d.agents_base) + list(d.states_base)
    clauses += [Clause(r.to_term()) for r in d.rules_base]
    kb = DescriptionKB(clauses, dynamic_predicates(d), seed=seed)
    kb.description = d
    kb.rules = list(d.rules_base)
    return kb


# --- printing ---------------------------------------------------------------

def format_description(d: AslDescription) -> dict[str, str]:
    """Render the three bases back to clause text, one clause per line."""
    return {
        "agents": "".join(f"{c}\n" for c in d.agents_base),
        "states": "".join(f"{c}\n" for c in d.states_base),
        "rules": "".join(f"{r}\n" for r in d.rules_base),
    }


__all__ = [
    "AslDescription", "AslSyntaxError", "Branch", "DescriptionKB", "Diagnostic", "Location",
    "RuleStatement", "errors_only", "format_description", "load_description", "load_directory",
    "lower", "make_list", "parse_description", "validate",
]
