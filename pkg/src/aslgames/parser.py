"""Tokenizer and operator-precedence reader for ASL clause text.

The grammar is the one in ``docs/grammar.ebnf``. Operators, loosest first::

    :-  (1200 xfx)     ,  (1000 xfy)     if C then Q where W  (950, mixfix)
    \\+  (900 fy)       withProb (800 xfx)  and (750 xfy)
    = \\= == @< < >= ... (700 xfx)   + - (500 yfx)   * / (400 yfx)
    - (200 fy)         ~ (100 fy)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .engine import Clause, flatten_conjunction
from .errors import AslSyntaxError, OperatorError
from .terms import NIL, Num, Struct, Sym, Term, Var, fresh_serial, make_list

INFIX_OPS: dict[str, tuple[int, str]] = {
    ":-": (1200, "xfx"),
    ",": (1000, "xfy"),
    "withProb": (800, "xfx"),
    "and": (750, "xfy"),
    **{op: (700, "xfx") for op in (
        "=", "\\=", "==", "\\==", "@<", "@>", "@=<", "@>=",
        "<", ">", "=<", ">=", "=:=", "=\\=", "is",
    )},
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "/": (400, "yfx"),
}
PREFIX_OPS: dict[str, tuple[int, str]] = {
    "\\+": (900, "fy"),
    "-": (200, "fy"),
    "~": (100, "fy"),
}
MIXFIX_PREC = 950

_SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")


@dataclass(frozen=True)
class Token:
    kind: str  # atom, var, num, punct, end, eof, qatom
    value: str
    line: int
    col: int
    pos: int
    spaced: bool  # preceded by whitespace/comment


_TOKEN_RE = re.compile(
    r"""
    (?P<num>\d+r\d+|\d+\.\d+|\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<atom>[a-z][A-Za-z0-9_]*)
  | (?P<punct>[()\[\]{},|!;])
    """,
    re.VERBOSE,
)


class Lexer:
    def __init__(self, text: str, filename: str = "<string>") -> None:
        self.text = text
        self.filename = filename
        self.pos = 0
        self.line = 1
        self.line_start = 0

    def error(self, message: str, pos: int | None = None) -> AslSyntaxError:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return AslSyntaxError(message, self.filename, line, col)

    def _skip(self) -> bool:
        text, start = self.text, self.pos
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "%":
                nl = text.find("\n", self.pos)
                self.pos = len(text) if nl < 0 else nl + 1
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    raise self.error("unterminated block comment")
                self.pos = end + 2
            else:
                break
        return self.pos != start

    def tokens(self) -> Iterator[Token]:
        text = self.text
        while True:
            spaced = self._skip() or self.pos == 0
            if self.pos >= len(text):
                yield self._token("eof", "", self.pos, spaced)
                return
            start = self.pos
            ch = text[start]
            if ch == "'":
                yield self._quoted(start, spaced)
                continue
            if ch in _SYMBOL_CHARS:
                end = start
                while end < len(text) and text[end] in _SYMBOL_CHARS:
                    end += 1
                run = text[start:end]
                if run == "." and (end == len(text) or text[end].isspace() or text[end] == "%"):
                    self.pos = end
                    yield self._token("end", ".", start, spaced)
                    continue
                self.pos = end
                yield self._token("atom", run, start, spaced)
                continue
            m = _TOKEN_RE.match(text, start)
            if not m:
                raise self.error(f"unexpected character {ch!r}", start)
            self.pos = m.end()
            kind = m.lastgroup
            yield self._token(kind, m.group(), start, spaced)

    def _quoted(self, start: int, spaced: bool) -> Token:
        text, i, out = self.text, start + 1, []
        while i < len(text):
            ch = text[i]
            if ch == "\\" and i + 1 < len(text):
                out.append(text[i + 1])
                i += 2
            elif ch == "'":
                if text.startswith("''", i):
                    out.append("'")
                    i += 2
                    continue
                self.pos = i + 1
                return self._token("qatom", "".join(out), start, spaced)
            else:
                out.append(ch)
                i += 1
        raise self.error("unterminated quoted atom", start)

    def _token(self, kind: str, value: str, pos: int, spaced: bool) -> Token:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return Token(kind, value, line, col, pos, spaced)


def parse_number(text: str) -> Fraction:
    if "r" in text:
        n, d = text.split("r")
        return Fraction(int(n), int(d))
    return Fraction(text)  # exact: Fraction("0.6") == 3/5


_TERM_END = {")", "]", "}", ",", "|"}


class Parser:
    def __init__(self, text: str, filename: str = "<string>") -> None:
        self.lexer = Lexer(text, filename)
        self.filename = filename
        self.toks = list(self.lexer.tokens())
        self.i = 0
        self.varmap: dict[str, Var] = {}

    # token helpers -------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: Token | None = None, cls=AslSyntaxError) -> AslSyntaxError:
        tok = tok or self.tok
        return cls(message, self.filename, tok.line, tok.col)

    def expect(self, kind: str, value: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (value is not None and t.value != value):
            want = value or kind
            got = "end of input" if t.kind == "eof" else repr(t.value)
            raise self.error(f"expected {want!r}, found {got}")
        return self.advance()

    def _is_name(self, t: Token, value: str) -> bool:
        return t.kind in ("atom", "punct") and t.value == value

    # clauses -------------------------------------------------------------
    def clauses(self) -> Iterator[tuple[Clause, int]]:
        while self.tok.kind != "eof":
            self.varmap = {}
            line = self.tok.line
            term = self.parse(1200)
            if self.tok.kind != "end":
                if self.tok.kind == "eof":
                    raise self.error(f"clause starting on line {line} is missing its terminating '.'")
                raise self.error(f"operator expected before {self.tok.value!r} "
                                 f"(clause starting on line {line})", cls=OperatorError)
            self.advance()
            yield to_clause(term, self, line), line

    # terms ---------------------------------------------------------------
    def parse(self, max_prec: int) -> Term:
        left, left_prec = self.parse_primary(max_prec)
        return self.parse_infix(left, left_prec, max_prec)

    def parse_infix(self, left: Term, left_prec: int, max_prec: int) -> Term:
        while True:
            t = self.tok
            name = t.value if t.kind in ("atom", "punct") else None
            if name not in INFIX_OPS:
                return left
            prec, kind = INFIX_OPS[name]
            if prec > max_prec:
                return left
            la = prec - 1 if kind in ("xfx", "xfy") else prec
            ra = prec - 1 if kind in ("xfx", "yfx") else prec
            if left_prec > la:
                raise self.error(f"operator priority clash at {name!r}", cls=OperatorError)
            self.advance()
            right = self.parse(ra)
            left, left_prec = Struct(name, (left, right)), prec
            if kind == "xfx":
                nxt = self.tok
                if nxt.kind in ("atom", "punct") and INFIX_OPS.get(nxt.value, (0,))[0] == prec \
                        and prec <= max_prec:
                    raise self.error(f"operator {nxt.value!r} cannot follow non-associative "
                                     f"{name!r}", nxt, OperatorError)

    def _starts_term(self, t: Token) -> bool:
        if t.kind in ("eof", "end"):
            return False
        if t.kind == "punct":
            return t.value in ("(", "[", "{", "!")
        if t.kind == "atom" and t.value in INFIX_OPS and t.value not in PREFIX_OPS:
            return False
        return t.value not in ("then", "where")

    def parse_primary(self, max_prec: int) -> tuple[Term, int]:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(parse_number(t.value)), 0
        if t.kind == "var":
            self.advance()
            if t.value == "_":
                return Var("_", fresh_serial()), 0
            if t.value not in self.varmap:
                self.varmap[t.value] = Var(t.value)
            return self.varmap[t.value], 0
        if t.kind == "punct":
            if t.value == "(":
                self.advance()
                inner = self.parse(1200)
                self.expect("punct", ")")
                return inner, 0
            if t.value == "[":
                return self.parse_list(), 0
            if t.value == "{":
                self.advance()
                if self._is_name(self.tok, "}"):
                    self.advance()
                    return Sym("{}"), 0
                inner = self.parse(1200)
                self.expect("punct", "}")
                return Struct("{}", (inner,)), 0
            if t.value in ("!", ";"):
                self.advance()
                return Sym(t.value), 0
            raise self.error(f"unexpected {t.value!r}")
        if t.kind in ("atom", "qatom"):
            name = t.value
            nxt = self.peek()
            if nxt.kind == "punct" and nxt.value == "(" and not nxt.spaced:
                self.advance()
                return self.parse_compound(name), 0
            if t.kind == "atom" and name == "if":
                return self.parse_if(max_prec)
            if t.kind == "atom" and name == "-" and nxt.kind == "num" and not nxt.spaced:
                self.advance()
                self.advance()
                return Num(-parse_number(nxt.value)), 0
            if t.kind == "atom" and name in PREFIX_OPS and self._starts_term(nxt):
                prec, kind = PREFIX_OPS[name]
                if prec > max_prec:
                    prec = 999
                self.advance()
                arg = self.parse(prec if kind == "fy" else prec - 1)
                return Struct(name, (arg,)), prec
            self.advance()
            prec = max(INFIX_OPS.get(name, (0,))[0], PREFIX_OPS.get(name, (0,))[0])
            return Sym(name), (prec if prec <= max_prec else 0)
        if t.kind == "end":
            raise self.error("unexpected end of clause")
        raise self.error("unexpected end of input")

    def parse_compound(self, name: str) -> Term:
        self.expect("punct", "(")
        args = [self.parse(999)]
        while self._is_name(self.tok, ","):
            self.advance()
            args.append(self.parse(999))
        self.expect("punct", ")")
        return Struct(name, tuple(args))

    def parse_list(self) -> Term:
        self.expect("punct", "[")
        if self._is_name(self.tok, "]"):
            self.advance()
            return NIL
        items = [self.parse(999)]
        while self._is_name(self.tok, ","):
            self.advance()
            items.append(self.parse(999))
        tail = NIL
        if self._is_name(self.tok, "|"):
            self.advance()
            tail = self.parse(999)
        self.expect("punct", "]")
        return make_list(items, tail)

    def parse_if(self, max_prec: int) -> tuple[Term, int]:
        start = self.advance()
        if MIXFIX_PREC > max_prec:
            raise self.error("'if ... then ... where ...' must be parenthesized here", start, OperatorError)
        condition = self.parse(899)
        if not self._is_name(self.tok, "then"):
            raise self.error("'if' without matching 'then'", cls=OperatorError)
        self.advance()
        consequence = self.parse(899)
        if not self._is_name(self.tok, "where"):
            raise self.error("'then' without matching 'where'", cls=OperatorError)
        self.advance()
        constraints = self.parse(899)
        return Struct("if_then_where", (condition, consequence, constraints)), MIXFIX_PREC


def to_clause(term: Term, parser: Parser | None = None, line: int = 0) -> Clause:
    if isinstance(term, Struct) and term.functor == ":-" and term.arity == 2:
        head, body = term.args
        goals = tuple(flatten_conjunction(body, (",",)))
    else:
        head, goals = term, ()
    if not isinstance(head, (Sym, Struct)):
        if parser is not None:
            raise AslSyntaxError(f"clause head must be an atom or compound, got {head}",
                                 parser.filename, line, 1)
        raise AslSyntaxError(f"clause head must be an atom or compound, got {head}")
    return Clause(head, goals)


def parse_clauses(text: str, filename: str = "<string>") -> list[tuple[Clause, int]]:
    """Parse clause text into ``(clause, line)`` pairs."""
    return list(Parser(text, filename).clauses())


def parse_term(text: str) -> Term:
    """Parse a single term (no trailing period needed)."""
    p = Parser(text)
    term = p.parse(1200)
    if p.tok.kind == "end":
        p.advance()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.value!r} after term", cls=OperatorError)
    return term
