"""Text formats for structures (``.fms``) and counting formulas (``.fml``).

Structure grammar::

    universe <name>+ ;
    ( rel <Name>/<arity> { (<name>,...)* } ; | const <name> = <element> ; )*

Formula grammar::

    ( sovar <Name>/<arity> ; )*
    count ( <vars> ) : [ forall <vars> . ] <expr>

with ``!`` binding tighter than ``&``, then ``|``, then right-associative
``->``.  ``x = y`` is an equality atom.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .logic import (
    And,
    Const,
    Eq,
    FiniteStructure,
    FOAtom,
    Formula,
    GroundAtom,
    Implies,
    Not,
    Or,
    PrenexUniversal,
    Query,
    SOAtom,
    SO,
    Symbol,
    Truth,
    Vocabulary,
    free_vars,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    offset: int

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<arrow>->)
  | (?P<punct>[;/{}(),=:.&|!])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = SourceSpan(line, col, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            if kind == "arrow":
                kind = "punct"
            tokens.append(Token(kind, chunk, span))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(line, col, pos)))
    return tokens


class _Cursor:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "name") and self.tok.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.describe()}")
        return self.advance()

    def name(self, what: str = "name") -> Token:
        if self.tok.kind != "name":
            self.fail(f"expected {what}, found {self.describe()}")
        return self.advance()

    def integer(self) -> int:
        if self.tok.kind != "int":
            self.fail(f"expected integer, found {self.describe()}")
        return int(self.advance().text)

    def describe(self) -> str:
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.text)

    def fail(self, message: str, span: SourceSpan | None = None):
        raise ParseError(message, span or self.tok.span)


# ----------------------------------------------------------------------------
# Structures


def parse_structure(text: str) -> FiniteStructure:
    """Parse a ``.fms`` document; the vocabulary is ``result.vocab``."""
    cur = _Cursor(text)
    cur.expect("universe")
    universe, seen = [], set()
    while cur.tok.kind == "name":
        t = cur.advance()
        if t.text in seen:
            cur.fail(f"duplicate universe element {t.text!r}", t.span)
        seen.add(t.text)
        universe.append(t.text)
    if not universe:
        cur.fail("universe must list at least one element")
    cur.expect(";")

    symbols, relations, constants = [], {}, {}
    names = set()
    while cur.tok.kind != "eof":
        if cur.at("rel"):
            cur.advance()
            nt = cur.name("relation name")
            if nt.text in names:
                cur.fail(f"duplicate symbol {nt.text!r}", nt.span)
            cur.expect("/")
            at = cur.tok
            arity = cur.integer()
            if arity < 1:
                cur.fail("arity must be >= 1", at.span)
            cur.expect("{")
            tuples = set()
            while cur.at("("):
                open_span = cur.advance().span
                row = []
                while True:
                    et = cur.name("element")
                    if et.text not in seen:
                        cur.fail(f"element {et.text!r} not in universe", et.span)
                    row.append(et.text)
                    if cur.at(","):
                        cur.advance()
                        continue
                    break
                cur.expect(")")
                if len(row) != arity:
                    cur.fail(f"arity mismatch: {nt.text}/{arity} given a {len(row)}-tuple", open_span)
                tuples.add(tuple(row))
                if cur.at(","):
                    cur.advance()
            cur.expect("}")
            cur.expect(";")
            names.add(nt.text)
            symbols.append(Symbol(nt.text, arity))
            relations[nt.text] = frozenset(tuples)
        elif cur.at("const"):
            cur.advance()
            nt = cur.name("constant name")
            if nt.text in names:
                cur.fail(f"duplicate symbol {nt.text!r}", nt.span)
            cur.expect("=")
            et = cur.name("element")
            if et.text not in seen:
                cur.fail(f"element {et.text!r} not in universe", et.span)
            cur.expect(";")
            names.add(nt.text)
            constants[nt.text] = et.text
        else:
            cur.fail(f"expected 'rel' or 'const', found {cur.describe()}")
    vocab = Vocabulary(tuple(symbols), tuple(constants))
    return FiniteStructure(tuple(universe), relations, constants, vocab)


def _sort_key(t: tuple, order: dict) -> tuple:
    return tuple(order[e] for e in t)


def format_structure(structure: FiniteStructure) -> str:
    order = {e: i for i, e in enumerate(structure.universe)}
    lines = [f"universe {' '.join(structure.universe)};"]
    for sym in structure.vocab.symbols:
        tuples = sorted(structure.relations[sym.name], key=lambda t: _sort_key(t, order))
        body = " ".join(f"({','.join(t)})" for t in tuples)
        lines.append(f"rel {sym.name}/{sym.arity} {{ {body} }};" if body else f"rel {sym.name}/{sym.arity} {{ }};")
    for name in structure.vocab.constants:
        lines.append(f"const {name} = {structure.constants[name]};")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# Formulas

_RESERVED = {"forall", "true", "false", "count", "sovar"}


class _FormulaParser:
    def __init__(self, cur: _Cursor, vocab: Vocabulary):
        self.cur = cur
        self.vocab = vocab

    def variables(self, closer: str) -> list[str]:
        cur = self.cur
        out = []
        while cur.tok.kind == "name" and not cur.at(closer):
            t = cur.advance()
            self._check_var(t)
            if t.text in out:
                cur.fail(f"duplicate variable {t.text!r}", t.span)
            out.append(t.text)
            if cur.at(","):
                cur.advance()
        return out

    def _check_var(self, t: Token):
        if t.text in _RESERVED:
            self.cur.fail(f"reserved word {t.text!r} used as a variable", t.span)
        if self.vocab.has(t.text):
            self.cur.fail(f"symbol {t.text!r} used as a variable", t.span)

    def expr(self) -> Formula:
        left = self.disjunction()
        if self.cur.at("->"):
            self.cur.advance()
            return Implies(left, self.expr())
        return left

    def disjunction(self) -> Formula:
        items = [self.conjunction()]
        while self.cur.at("|"):
            self.cur.advance()
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conjunction(self) -> Formula:
        items = [self.unary()]
        while self.cur.at("&"):
            self.cur.advance()
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self) -> Formula:
        cur = self.cur
        if cur.at("!"):
            cur.advance()
            return Not(self.unary())
        if cur.at("("):
            cur.advance()
            inner = self.expr()
            cur.expect(")")
            return inner
        if cur.at("forall"):
            cur.fail("quantifier inside matrix (only prenex formulas are accepted)")
        if cur.at("true") or cur.at("false"):
            return Truth(cur.advance().text == "true")
        if cur.tok.kind != "name":
            cur.fail(f"malformed expression: unexpected {cur.describe()}")
        if cur.peek().kind == "punct" and cur.peek().text == "(":
            return self.atom()
        left = self.term(cur.advance())
        if not cur.at("="):
            cur.fail(f"malformed expression: expected '(' or '=' after {self._term_text(left)!r}")
        cur.advance()
        return Eq(left, self.term(cur.name("term")))

    @staticmethod
    def _term_text(t) -> str:
        return t.name if isinstance(t, Const) else t

    def term(self, t: Token):
        if self.vocab.is_constant(t.text):
            return Const(t.text)
        self._check_var(t)
        return t.text

    def atom(self) -> Formula:
        cur = self.cur
        nt = cur.advance()
        if not self.vocab.has(nt.text):
            cur.fail(f"unknown symbol {nt.text!r}", nt.span)
        sym = self.vocab.get(nt.text)
        cur.expect("(")
        args = []
        while True:
            args.append(self.term(cur.name("term")))
            if cur.at(","):
                cur.advance()
                continue
            break
        cur.expect(")")
        if len(args) != sym.arity:
            cur.fail(f"{sym.name} has arity {sym.arity}, applied to {len(args)} arguments", nt.span)
        cls = SOAtom if sym.kind == SO else FOAtom
        return cls(sym.name, tuple(args))


def parse_formula(text: str, vocab: Vocabulary) -> Query:
    """Parse a ``.fml`` document against the vocabulary of a structure."""
    cur = _Cursor(text)
    so_symbols = []
    while cur.at("sovar"):
        cur.advance()
        nt = cur.name("predicate name")
        if nt.text in _RESERVED or vocab.has(nt.text) or vocab.is_constant(nt.text) \
                or any(s.name == nt.text for s in so_symbols):
            cur.fail(f"duplicate symbol {nt.text!r}", nt.span)
        cur.expect("/")
        at = cur.tok
        arity = cur.integer()
        if arity < 1:
            cur.fail("arity must be >= 1", at.span)
        so_symbols.append(Symbol(nt.text, arity, SO))
        while cur.at(";"):
            cur.advance()
    full = vocab.extend(so_symbols)
    fp = _FormulaParser(cur, full)

    cur.expect("count")
    cur.expect("(")
    free = fp.variables(")")
    cur.expect(")")
    cur.expect(":")
    bound = []
    if cur.at("forall"):
        span = cur.advance().span
        bound = fp.variables(".")
        if not bound:
            cur.fail("forall needs at least one variable", span)
        clash = set(bound) & set(free)
        if clash:
            cur.fail(f"variable {sorted(clash)[0]!r} is both free and bound", span)
        cur.expect(".")
    start = cur.tok.span
    matrix = fp.expr()
    if cur.tok.kind != "eof":
        cur.fail(f"malformed clause: unexpected {cur.describe()}")
    loose = sorted(free_vars(matrix) - set(free) - set(bound))
    if loose:
        cur.fail(f"unbound variable {loose[0]!r}", start)
    body = PrenexUniversal(tuple(bound), matrix) if bound else matrix
    return Query(tuple(free), body, full)


def _format_term(t) -> str:
    return t.name if isinstance(t, Const) else t


def format_formula(f: Formula) -> str:
    if isinstance(f, (FOAtom, SOAtom)):
        return f"{f.symbol}({','.join(_format_term(a) for a in f.args)})"
    if isinstance(f, GroundAtom):
        return str(f)
    if isinstance(f, Eq):
        return f"{_format_term(f.left)} = {_format_term(f.right)}"
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        inner = format_formula(f.arg)
        if isinstance(f.arg, (And, Or, Eq)):
            inner = f"({inner})"
        return "!" + inner
    if isinstance(f, (And, Or)):
        sep = " & " if isinstance(f, And) else " | "
        parts = []
        for a in f.args:
            s = format_formula(a)
            parts.append(f"({s})" if isinstance(a, (And, Or)) else s)
        return sep.join(parts)
    if isinstance(f, PrenexUniversal):
        return f"forall {' '.join(f.variables)} . {format_formula(f.matrix)}"
    raise TypeError(f"not a formula: {f!r}")


def format_query(q: Query, *, wrap: bool = False) -> str:
    """Render a query as ``.fml`` text.

    With ``wrap`` a top-level conjunction is written one conjunct per line,
    which keeps large encoder outputs readable and diff-friendly.
    """
    lines = [f"sovar {s.name}/{s.arity};" for s in q.so_symbols]
    head = f"count ({','.join(q.free)}) :"
    body = q.body
    prefix = ""
    if isinstance(body, PrenexUniversal):
        prefix = f" forall {' '.join(body.variables)} ."
        body = body.matrix
    if wrap and isinstance(body, And):
        lines.append(head + prefix)
        parts = []
        for a in body.args:
            s = format_formula(a)
            parts.append(f"  ({s})" if isinstance(a, (And, Or)) else f"  {s}")
        lines.append(" &\n".join(parts))
    else:
        lines.append(f"{head}{prefix} {format_formula(body)}")
    return "\n".join(lines) + "\n"
