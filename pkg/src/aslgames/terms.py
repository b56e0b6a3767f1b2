"""Logical terms: variables, exact numbers, symbols and compound terms."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Iterator, Union

from .errors import NonGroundComparison


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    serial: int = 0

    def __str__(self) -> str:
        return self.name if self.serial == 0 else f"{self.name}_{self.serial}"


@dataclass(frozen=True, slots=True)
class Num:
    value: Fraction

    def __init__(self, value: Fraction | int | str) -> None:
        object.__setattr__(self, "value", Fraction(value))

    def __str__(self) -> str:
        return format_number(self.value)


@dataclass(frozen=True, slots=True)
class Sym:
    name: str

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Struct:
    functor: str
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("compound terms need at least one argument")

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, Num, Sym, Struct]

NIL = Sym("[]")
TRUE = Sym("true")

_fresh = itertools.count(1)


def fresh_serial() -> int:
    return next(_fresh)


def struct(functor: str, *args: Term) -> Term:
    """Build a compound, or a symbol when no arguments are given."""
    return Struct(functor, tuple(args)) if args else Sym(functor)


def to_term(value: object) -> Term:
    """Coerce Python scalars into terms (str -> Sym, int/Fraction -> Num)."""
    if isinstance(value, (Var, Num, Sym, Struct)):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not terms")
    if isinstance(value, (int, Fraction)):
        return Num(value)
    if isinstance(value, str):
        return Sym(value)
    raise TypeError(f"cannot convert {value!r} to a term")


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    items = list(items)
    result = tail
    for item in reversed(items):
        result = Struct(".", (item, result))
    return result


def list_items(term: Term) -> list[Term] | None:
    """Return the elements of a proper list term, or None."""
    out = []
    while isinstance(term, Struct) and term.functor == "." and term.arity == 2:
        out.append(term.args[0])
        term = term.args[1]
    return out if term == NIL else None


def indicator(term: Term) -> tuple[str, int]:
    if isinstance(term, Struct):
        return term.functor, term.arity
    if isinstance(term, Sym):
        return term.name, 0
    raise TypeError(f"{term} is not callable")


def term_vars(term: Term) -> Iterator[Var]:
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t
        elif isinstance(t, Struct):
            stack.extend(reversed(t.args))


def is_ground(term: Term) -> bool:
    return next(term_vars(term), None) is None


def rename(term: Term, mapping: dict[Var, Var]) -> Term:
    """Standardize apart: map every variable to a fresh one (shared per mapping)."""
    if isinstance(term, Var):
        if term not in mapping:
            mapping[term] = Var(term.name, fresh_serial())
        return mapping[term]
    if isinstance(term, Struct):
        return Struct(term.functor, tuple(rename(a, mapping) for a in term.args))
    return term


# --- standard order -------------------------------------------------------

def _rank(term: Term) -> int:
    if isinstance(term, Num):
        return 0
    if isinstance(term, Sym):
        return 1
    return 2


def compare(a: Term, b: Term) -> int:
    """Total order on ground terms: Number < Symbol < Compound."""
    if isinstance(a, Var) or isinstance(b, Var):
        raise NonGroundComparison(f"cannot order non-ground terms {a} and {b}")
    ra, rb = _rank(a), _rank(b)
    if ra != rb:
        return -1 if ra < rb else 1
    if isinstance(a, Num):
        return (a.value > b.value) - (a.value < b.value)
    if isinstance(a, Sym):
        return (a.name > b.name) - (a.name < b.name)
    if a.arity != b.arity:
        return -1 if a.arity < b.arity else 1
    if a.functor != b.functor:
        return -1 if a.functor < b.functor else 1
    for x, y in zip(a.args, b.args):
        c = compare(x, y)
        if c:
            return c
    return 0


def check_ground(term: Term) -> None:
    if not is_ground(term):
        raise NonGroundComparison(f"term {term} is not ground")


def standard_order(a: Term, b: Term) -> int:
    check_ground(a)
    check_ground(b)
    return compare(a, b)


order_key = cmp_to_key(compare)


def sort_terms(terms: Iterable[Term]) -> list[Term]:
    return sorted(terms, key=order_key)


# --- overwriting operator -------------------------------------------------

def is_overwrite(term: Term) -> bool:
    return isinstance(term, Struct) and term.functor == "~" and term.arity == 1


def complement(term: Term) -> Term:
    """``f`` <-> ``~f``."""
    return term.args[0] if is_overwrite(term) else Struct("~", (term,))


# --- formatting -----------------------------------------------------------

_PLAIN_ATOM = re.compile(r"^[a-z][A-Za-z0-9_]*$")
_SYMBOL_ATOM = re.compile(r"^[+\-*/\\^<>=~:.?@#&$]+$")
_SOLO = {"[]", "!", ";", "{}", ","}

# (precedence, type) for printing operators back in infix/prefix form
INFIX = {
    ":-": (1200, "xfx"),
    ";": (1100, "xfy"),
    ",": (1000, "xfy"),
    "withProb": (800, "xfx"),
    "and": (750, "xfy"),
    "=": (700, "xfx"), "\\=": (700, "xfx"), "==": (700, "xfx"), "\\==": (700, "xfx"),
    "@<": (700, "xfx"), "@>": (700, "xfx"), "@=<": (700, "xfx"), "@>=": (700, "xfx"),
    "<": (700, "xfx"), ">": (700, "xfx"), "=<": (700, "xfx"), ">=": (700, "xfx"),
    "=:=": (700, "xfx"), "=\\=": (700, "xfx"), "is": (700, "xfx"),
    "+": (500, "yfx"), "-": (500, "yfx"),
    "*": (400, "yfx"), "/": (400, "yfx"),
}
PREFIX = {
    ":-": (1200, "fx"),
    "\\+": (900, "fy"),
    "-": (200, "fy"),
    "~": (100, "fy"),
}


def format_number(value: Fraction) -> str:
    """Integers as-is, terminating rationals as decimals, others as ``NrD``."""
    if value.denominator == 1:
        return str(value.numerator)
    d = value.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        sign = "-" if value < 0 else ""
        v = abs(value)
        whole, frac = divmod(v.numerator, v.denominator)
        digits = ""
        while frac:
            frac *= 10
            digit, frac = divmod(frac, v.denominator)
            digits += str(digit)
        return f"{sign}{whole}.{digits}"
    return f"{value.numerator}r{value.denominator}"


def format_atom(name: str) -> str:
    if _PLAIN_ATOM.match(name) or _SYMBOL_ATOM.match(name) or name in _SOLO:
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def format_term(term: Term, max_prec: int = 999) -> str:
    if isinstance(term, Var):
        return str(term)
    if isinstance(term, Num):
        return format_number(term.value)
    if isinstance(term, Sym):
        return format_atom(term.name)
    f, args = term.functor, term.args
    if f == "." and len(args) == 2:
        items, tail = [], term
        while isinstance(tail, Struct) and tail.functor == "." and tail.arity == 2:
            items.append(tail.args[0])
            tail = tail.args[1]
        body = ", ".join(format_term(i) for i in items)
        if tail != NIL:
            body += "|" + format_term(tail)
        return f"[{body}]"
    if f == "{}" and len(args) == 1:
        return "{" + format_term(args[0], 1200) + "}"
    if f == "if_then_where" and len(args) == 3:
        text = (f"if {format_term(args[0], 899)} then {format_term(args[1], 899)}"
                f" where {format_term(args[2], 899)}")
        return f"({text})" if max_prec < 950 else text
    if len(args) == 2 and f in INFIX:
        prec, kind = INFIX[f]
        lp = prec - 1 if kind in ("xfx", "xfy") else prec
        rp = prec - 1 if kind in ("xfx", "yfx") else prec
        left = format_term(args[0], lp)
        right = format_term(args[1], rp)
        sep = ", " if f == "," else f" {f} "
        text = f"{left}{sep}{right}"
        return f"({text})" if prec > max_prec else text
    if len(args) == 1 and f in PREFIX:
        prec, kind = PREFIX[f]
        ap = prec if kind == "fy" else prec - 1
        inner = format_term(args[0], ap)
        if f == "-" and isinstance(args[0], Num):
            inner = f"({inner})"
        text = f"{f}{inner}" if f != "\\+" else f"\\+ {inner}"
        return f"({text})" if prec > max_prec else text
    return f"{format_atom(f)}(" + ", ".join(format_term(a) for a in args) + ")"
