"""A small SLD resolution engine over :mod:`aslgames.terms`.

Depth-first, leftmost goal, clauses tried in declaration order. Supports
negation as failure, unification/standard-order comparisons, ``member/2``,
``findall/3``, arithmetic comparison, brace constraints ``{V = Expr}`` and a
seeded ``random_member/2``. There is no cut and no assert/retract inside
clause bodies.
"""

from __future__ import annotations

import random
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .errors import (
    ArithmeticFault,
    InstantiationError,
    RetractMissing,
    UnboundArithmetic,
    UnknownPredicate,
)
from .terms import (
    NIL,
    Num,
    Struct,
    Sym,
    Term,
    Var,
    compare,
    check_ground,
    indicator,
    is_ground,
    list_items,
    make_list,
    rename,
)

Substitution = dict  # Var -> Term


@dataclass(frozen=True)
class Clause:
    head: Term
    body: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.head, (Sym, Struct)):
            raise TypeError(f"clause head must be callable, got {self.head}")

    @property
    def is_fact(self) -> bool:
        return not self.body

    def renamed(self) -> "Clause":
        mapping: dict[Var, Var] = {}
        return Clause(rename(self.head, mapping), tuple(rename(g, mapping) for g in self.body))

    def __str__(self) -> str:
        from .terms import format_term

        if not self.body:
            return format_term(self.head, 1199) + "."
        body = ", ".join(format_term(g, 999) for g in self.body)
        return f"{format_term(self.head, 1199)} :- {body}."


# --- substitutions ----------------------------------------------------------

def walk(term: Term, s: Substitution) -> Term:
    while isinstance(term, Var) and term in s:
        term = s[term]
    return term


def substitute(term: Term, s: Substitution) -> Term:
    term = walk(term, s)
    if isinstance(term, Struct):
        return Struct(term.functor, tuple(substitute(a, s) for a in term.args))
    return term


def _occurs(var: Var, term: Term, s: Substitution) -> bool:
    stack = [term]
    while stack:
        t = walk(stack.pop(), s)
        if t == var:
            return True
        if isinstance(t, Struct):
            stack.extend(t.args)
    return False


def unify(t1: Term, t2: Term, s: Substitution | None = None) -> Substitution | None:
    """Most general unifier extending ``s`` (occurs check on), or None."""
    s = dict(s or {})
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a, b = walk(a, s), walk(b, s)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs(a, b, s):
                return None
            s[a] = b
        elif isinstance(b, Var):
            if _occurs(b, a, s):
                return None
            s[b] = a
        elif isinstance(a, Struct) and isinstance(b, Struct):
            if a.functor != b.functor or a.arity != b.arity:
                return None
            stack.extend(zip(a.args, b.args))
        else:
            return None
    return s


def normalize(s: Substitution) -> Substitution:
    """Resolve binding chains so the substitution is idempotent."""
    return {v: substitute(t, s) for v, t in s.items()}


# --- arithmetic -------------------------------------------------------------

_BINARY: dict[str, Callable[[Fraction, Fraction], Fraction]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "min": min,
    "max": max,
}


def evaluate(expr: Term, s: Substitution) -> Fraction:
    expr = walk(expr, s)
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Var):
        raise UnboundArithmetic(f"unbound variable {expr} in arithmetic expression")
    if isinstance(expr, Struct):
        if expr.arity == 2 and expr.functor in _BINARY:
            a, b = evaluate(expr.args[0], s), evaluate(expr.args[1], s)
            try:
                return _BINARY[expr.functor](a, b)
            except ZeroDivisionError:
                raise ArithmeticFault(f"division by zero in {substitute(expr, s)}") from None
        if expr.arity == 1 and expr.functor == "-":
            return -evaluate(expr.args[0], s)
        if expr.arity == 1 and expr.functor == "abs":
            return abs(evaluate(expr.args[0], s))
    raise ArithmeticFault(f"not an arithmetic expression: {substitute(expr, s)}")


_COMPARE = {
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "=<": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "=:=": lambda a, b: a == b,
    "=\\=": lambda a, b: a != b,
}

_ORDER = {
    "@<": lambda c: c < 0,
    "@>": lambda c: c > 0,
    "@=<": lambda c: c <= 0,
    "@>=": lambda c: c >= 0,
}

BUILTINS = {
    (",", 2), ("and", 2), ("true", 0), ("fail", 0), ("false", 0), ("\\+", 1),
    ("=", 2), ("\\=", 2), ("==", 2), ("\\==", 2), ("is", 2), ("{}", 1),
    ("member", 2), ("findall", 3), ("random_member", 2),
    *((op, 2) for op in _COMPARE), *((op, 2) for op in _ORDER),
}


# --- knowledge base ---------------------------------------------------------

class KnowledgeBase:
    """Static clauses plus a stack-like overlay of asserted ground facts."""

    def __init__(self, clauses: Iterable[Clause] = (), dynamic: Iterable[tuple[str, int]] = (),
                 seed: int = 0) -> None:
        self._static: dict[tuple[str, int], list[Clause]] = {}
        for clause in clauses:
            self.add_clause(clause)
        self.dynamic: set[tuple[str, int]] = set(dynamic)
        self._overlay: dict[tuple[str, int], dict[Term, int]] = {}
        self.reset_random(seed)

    def add_clause(self, clause: Clause) -> None:
        self._static.setdefault(indicator(clause.head), []).append(clause)

    def clauses(self, key: tuple[str, int]) -> list[Clause]:
        return self._static.get(key, [])

    def reset_random(self, seed: int) -> None:
        """Reseed ``random_member/2``; draws are memoized until the next reset."""
        self.seed = seed
        self._rng = random.Random(seed)
        self._draws: dict[Term, Term] = {}

    def clone(self) -> "KnowledgeBase":
        other = KnowledgeBase.__new__(KnowledgeBase)
        other._static = self._static
        other.dynamic = set(self.dynamic)
        other._overlay = {k: dict(v) for k, v in self._overlay.items()}
        other.seed = self.seed
        other._rng = random.Random()
        other._rng.setstate(self._rng.getstate())
        other._draws = dict(self._draws)
        return other

    # overlay -------------------------------------------------------------
    def assert_facts(self, facts: Iterable[Term]) -> None:
        for fact in facts:
            if not is_ground(fact):
                raise InstantiationError(f"cannot assert non-ground fact {fact}")
            bucket = self._overlay.setdefault(indicator(fact), {})
            bucket[fact] = bucket.get(fact, 0) + 1

    def retract_facts(self, facts: Iterable[Term]) -> None:
        for fact in facts:
            key = indicator(fact)
            bucket = self._overlay.get(key, {})
            if fact not in bucket:
                raise RetractMissing(f"fact {fact} is not in the database")
            bucket[fact] -= 1
            if not bucket[fact]:
                del bucket[fact]
                if not bucket:
                    del self._overlay[key]

    @contextmanager
    def assumed(self, facts: Iterable[Term]):
        facts = list(facts)
        self.assert_facts(facts)
        try:
            yield self
        finally:
            self.retract_facts(facts)

    def overlay_facts(self) -> list[Term]:
        return [f for bucket in self._overlay.values() for f in bucket]

    def snapshot(self) -> tuple:
        return tuple(sorted((k, tuple(v.items())) for k, v in self._overlay.items()))

    def knows(self, key: tuple[str, int]) -> bool:
        return key in self._static or key in self.dynamic or key in self._overlay or key in BUILTINS

    # querying ------------------------------------------------------------
    def solve(self, goal: Term, s: Substitution | None = None) -> Iterator[Substitution]:
        """Yield every substitution proving ``goal``, depth-first."""
        yield from self._solve(goal, dict(s or {}))

    def solve_all(self, goals: Iterable[Term], s: Substitution | None = None) -> Iterator[Substitution]:
        yield from self._solve_seq(list(goals), 0, dict(s or {}))

    def succeeds(self, goal: Term, s: Substitution | None = None) -> bool:
        return next(self.solve(goal, s), None) is not None

    def _solve_seq(self, goals: list[Term], i: int, s: Substitution) -> Iterator[Substitution]:
        if i == len(goals):
            yield s
            return
        for s1 in self._solve(goals[i], s):
            yield from self._solve_seq(goals, i + 1, s1)

    def _solve(self, goal: Term, s: Substitution) -> Iterator[Substitution]:
        goal = walk(goal, s)
        if isinstance(goal, Var):
            raise InstantiationError("goal is an unbound variable")
        if isinstance(goal, Num):
            raise InstantiationError(f"number {goal} is not callable")
        name, arity = indicator(goal)
        args = goal.args if isinstance(goal, Struct) else ()

        if (name, arity) in BUILTINS:
            yield from self._builtin(name, args, s)
            return

        key = (name, arity)
        if not self.knows(key):
            raise UnknownPredicate(f"unknown predicate {name}/{arity}")
        for clause in self._static.get(key, ()):
            c = clause.renamed()
            s1 = unify(goal, c.head, s)
            if s1 is not None:
                yield from self._solve_seq(list(c.body), 0, s1)
        for fact in list(self._overlay.get(key, ())):
            s1 = unify(goal, fact, s)
            if s1 is not None:
                yield s1

    def _builtin(self, name: str, args: tuple[Term, ...], s: Substitution) -> Iterator[Substitution]:
        if name in (",", "and"):
            for s1 in self._solve(args[0], s):
                yield from self._solve(args[1], s1)
        elif name == "true":
            yield s
        elif name in ("fail", "false"):
            return
        elif name == "\\+":
            if next(self._solve(args[0], s), None) is None:
                yield s
        elif name == "=":
            s1 = unify(args[0], args[1], s)
            if s1 is not None:
                yield s1
        elif name == "\\=":
            if unify(args[0], args[1], s) is None:
                yield s
        elif name == "==":
            if substitute(args[0], s) == substitute(args[1], s):
                yield s
        elif name == "\\==":
            if substitute(args[0], s) != substitute(args[1], s):
                yield s
        elif name in _ORDER:
            a, b = substitute(args[0], s), substitute(args[1], s)
            check_ground(a)
            check_ground(b)
            if _ORDER[name](compare(a, b)):
                yield s
        elif name in _COMPARE:
            if _COMPARE[name](evaluate(args[0], s), evaluate(args[1], s)):
                yield s
        elif name == "is":
            s1 = unify(args[0], Num(evaluate(args[1], s)), s)
            if s1 is not None:
                yield s1
        elif name == "{}":
            yield from self._brace(args[0], s)
        elif name == "member":
            items = list_items(substitute(args[1], s))
            if items is None:
                raise InstantiationError(f"member/2 needs a proper list, got {substitute(args[1], s)}")
            for item in items:
                s1 = unify(args[0], item, s)
                if s1 is not None:
                    yield s1
        elif name == "findall":
            template, goal = args[0], args[1]
            found = [substitute(template, s1) for s1 in self._solve(goal, s)]
            s1 = unify(args[2], make_list(found), s)
            if s1 is not None:
                yield s1
        elif name == "random_member":
            yield from self._random_member(args[0], args[1], s)

    def _brace(self, constraint: Term, s: Substitution) -> Iterator[Substitution]:
        constraint = walk(constraint, s)
        if isinstance(constraint, Struct) and constraint.functor == "," and constraint.arity == 2:
            for s1 in self._brace(constraint.args[0], s):
                yield from self._brace(constraint.args[1], s1)
            return
        if not (isinstance(constraint, Struct) and constraint.functor == "=" and constraint.arity == 2):
            raise ArithmeticFault(f"unsupported brace constraint {{{substitute(constraint, s)}}}")
        left, right = walk(constraint.args[0], s), walk(constraint.args[1], s)
        if isinstance(left, Var):
            s1 = unify(left, Num(evaluate(right, s)), s)
        elif isinstance(right, Var):
            s1 = unify(right, Num(evaluate(left, s)), s)
        else:
            s1 = s if evaluate(left, s) == evaluate(right, s) else None
        if s1 is not None:
            yield s1

    def _random_member(self, elem: Term, lst: Term, s: Substitution) -> Iterator[Substitution]:
        lst = substitute(lst, s)
        items = list_items(lst)
        if items is None or not is_ground(lst):
            raise InstantiationError(f"random_member/2 needs a ground list, got {lst}")
        if not items:
            return
        if lst not in self._draws:
            self._draws[lst] = items[self._rng.randrange(len(items))]
        s1 = unify(elem, self._draws[lst], s)
        if s1 is not None:
            yield s1


def solve(goal: Term, kb: KnowledgeBase, s: Substitution | None = None) -> Iterator[Substitution]:
    return kb.solve(goal, s)


def conjunction(goals: Iterable[Term]) -> Term:
    goals = list(goals)
    if not goals:
        return Sym("true")
    result = goals[-1]
    for g in reversed(goals[:-1]):
        result = Struct(",", (g, result))
    return result


def flatten_conjunction(term: Term, functors: tuple[str, ...] = (",", "and")) -> list[Term]:
    if isinstance(term, Struct) and term.functor in functors and term.arity == 2:
        return flatten_conjunction(term.args[0], functors) + flatten_conjunction(term.args[1], functors)
    return [term]


__all__ = [
    "BUILTINS", "Clause", "KnowledgeBase", "Substitution", "conjunction", "evaluate",
    "flatten_conjunction", "normalize", "solve", "substitute", "unify", "walk", "NIL",
]
