"""Vocabularies, finite structures, formula ASTs and quantifier-free evaluation.

Terms are plain ``str`` for first-order variables and :class:`Const` for
constant symbols.  Second-order atoms instantiated with universe elements
become :class:`GroundAtom` nodes, which is what partial evaluation produces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

from .errors import InputError, UnboundVariable, UnknownSymbol

FO = "fo"
SO = "so"


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: str = FO

    def __post_init__(self):
        if self.arity < 1:
            raise InputError(f"symbol {self.name}: arity must be >= 1")
        if self.kind not in (FO, SO):
            raise InputError(f"symbol {self.name}: bad kind {self.kind!r}")


@dataclass(frozen=True)
class Vocabulary:
    symbols: tuple[Symbol, ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        names = [s.name for s in self.symbols] + list(self.constants)
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise InputError(f"duplicate symbol name(s): {', '.join(sorted(dup))}")

    def get(self, name: str) -> Symbol:
        for s in self.symbols:
            if s.name == name:
                return s
        raise UnknownSymbol(name)

    def has(self, name: str) -> bool:
        return any(s.name == name for s in self.symbols)

    def is_constant(self, name: str) -> bool:
        return name in self.constants

    def is_second_order(self, name: str) -> bool:
        return any(s.name == name and s.kind == SO for s in self.symbols)

    @property
    def second_order(self) -> tuple[Symbol, ...]:
        return tuple(s for s in self.symbols if s.kind == SO)

    def extend(self, symbols: Iterable[Symbol]) -> "Vocabulary":
        return Vocabulary(self.symbols + tuple(symbols), self.constants)


@dataclass(frozen=True)
class FiniteStructure:
    universe: tuple[str, ...]
    relations: Mapping[str, frozenset]
    constants: Mapping[str, str] = field(default_factory=dict)
    vocab: Vocabulary = field(default_factory=Vocabulary)

    def __post_init__(self):
        if not self.universe:
            raise InputError("universe must be nonempty")
        if len(set(self.universe)) != len(self.universe):
            raise InputError("duplicate universe element")
        elems = set(self.universe)
        for name, tuples in self.relations.items():
            sym = self.vocab.get(name)
            if sym.kind != FO:
                raise InputError(f"relation {name} is declared second-order")
            for t in tuples:
                if len(t) != sym.arity:
                    raise InputError(f"tuple {t} has arity {len(t)}, {name} has arity {sym.arity}")
                bad = [e for e in t if e not in elems]
                if bad:
                    raise InputError(f"element {bad[0]!r} of {name}{t} not in universe")
        for name, e in self.constants.items():
            if e not in elems:
                raise InputError(f"constant {name} = {e!r} not in universe")

    @property
    def size(self) -> int:
        return len(self.universe)

    def holds(self, name: str, elements: tuple) -> bool:
        try:
            return tuple(elements) in self.relations[name]
        except KeyError:
            raise UnknownSymbol(name) from None

    def constant(self, name: str) -> str:
        try:
            return self.constants[name]
        except KeyError:
            raise UnknownSymbol(name) from None

    def reordered(self, universe: Iterable[str]) -> "FiniteStructure":
        universe = tuple(universe)
        if sorted(universe) != sorted(self.universe):
            raise InputError("reordering must be a permutation of the universe")
        return FiniteStructure(universe, self.relations, self.constants, self.vocab)


# ----------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True, order=True)
class Const:
    name: str


Term = Union[str, Const]


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


TRUE = Truth(True)
FALSE = Truth(False)


@dataclass(frozen=True)
class FOAtom(Formula):
    symbol: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class SOAtom(Formula):
    symbol: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq(Formula):
    """Equality between two terms, interpreted as identity of elements."""

    left: Term
    right: Term


@dataclass(frozen=True)
class GroundAtom(Formula):
    """A second-order atom whose arguments are universe elements."""

    symbol: str
    elements: tuple[str, ...]

    def __str__(self):
        if not self.elements:
            return self.symbol
        return f"{self.symbol}({','.join(self.elements)})"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("And needs at least two operands; use conj()")


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("Or needs at least two operands; use disj()")


@dataclass(frozen=True)
class PrenexUniversal(Formula):
    variables: tuple[str, ...]
    matrix: Formula

    def __post_init__(self):
        if not is_quantifier_free(self.matrix):
            raise InputError("matrix of a prenex formula must be quantifier-free")


ATOMS = (FOAtom, SOAtom, Eq, GroundAtom)


def Implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def conj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(items)


def disj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(items)


@dataclass(frozen=True)
class Query:
    """A counting expression: the tuples ``free`` satisfying ``body``.

    ``body`` is either quantifier-free (MAX Pi_0) or a single
    :class:`PrenexUniversal` block (MAX Pi_1).  ``vocab`` includes the
    second-order symbols declared for the query.
    """

    free: tuple[str, ...]
    body: Formula
    vocab: Vocabulary

    def __post_init__(self):
        if len(set(self.free)) != len(self.free):
            raise InputError("duplicate variable in count tuple")
        if isinstance(self.body, PrenexUniversal):
            clash = set(self.body.variables) & set(self.free)
            if clash:
                raise InputError(f"variable(s) both free and bound: {', '.join(sorted(clash))}")
        elif not is_quantifier_free(self.body):
            raise InputError("only prenex universal formulas are accepted")
        loose = free_vars(self.body) - set(self.free)
        if loose:
            raise UnboundVariable(sorted(loose)[0])

    @property
    def so_symbols(self) -> tuple[Symbol, ...]:
        return self.vocab.second_order

    @property
    def bound(self) -> tuple[str, ...]:
        return self.body.variables if isinstance(self.body, PrenexUniversal) else ()

    @property
    def matrix(self) -> Formula:
        return self.body.matrix if isinstance(self.body, PrenexUniversal) else self.body

    @property
    def is_pi1(self) -> bool:
        return isinstance(self.body, PrenexUniversal)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, PrenexUniversal):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    return True


def _term_vars(args) -> Iterator[str]:
    for a in args:
        if isinstance(a, str):
            yield a


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (FOAtom, SOAtom)):
        return frozenset(_term_vars(f.args))
    if isinstance(f, Eq):
        return frozenset(_term_vars((f.left, f.right)))
    if isinstance(f, (Truth, GroundAtom)):
        return frozenset()
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(a) for a in f.args))
    if isinstance(f, PrenexUniversal):
        return free_vars(f.matrix) - set(f.variables)
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> Iterator[Formula]:
    """Yield atom nodes in left-to-right order (with repetitions)."""
    if isinstance(f, ATOMS):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from atoms(a)
    elif isinstance(f, PrenexUniversal):
        yield from atoms(f.matrix)


# ----------------------------------------------------------------------------
# Second-order assignments


@dataclass(frozen=True)
class SOAssignment:
    """Truth tables for second-order symbols, row-major over the universe order."""

    universe: tuple[str, ...]
    symbols: tuple[Symbol, ...]
    tables: Mapping[str, tuple[bool, ...]]

    def __post_init__(self):
        n = len(self.universe)
        for s in self.symbols:
            table = self.tables.get(s.name)
            if table is None or len(table) != n ** s.arity:
                raise InputError(f"table for {s.name} must have exactly {n ** s.arity} entries")
        extra = set(self.tables) - {s.name for s in self.symbols}
        if extra:
            raise UnknownSymbol(sorted(extra)[0])

    @classmethod
    def from_flat(cls, universe, symbols, bits) -> "SOAssignment":
        n = len(universe)
        bits = tuple(bool(b) for b in bits)
        tables, pos = {}, 0
        for s in symbols:
            size = n ** s.arity
            tables[s.name] = bits[pos:pos + size]
            pos += size
        if pos != len(bits):
            raise InputError(f"expected {pos} bits, got {len(bits)}")
        return cls(tuple(universe), tuple(symbols), tables)

    @classmethod
    def from_sets(cls, universe, symbols, true_tuples: Mapping[str, Iterable[tuple]]) -> "SOAssignment":
        universe = tuple(universe)
        tables = {}
        for s in symbols:
            truths = {tuple(t) for t in true_tuples.get(s.name, ())}
            tables[s.name] = tuple(t in truths for t in itertools.product(universe, repeat=s.arity))
        return cls(universe, tuple(symbols), tables)

    def flat(self) -> tuple[bool, ...]:
        return tuple(b for s in self.symbols for b in self.tables[s.name])

    def index(self, symbol: Symbol, elements: tuple) -> int:
        pos = {e: i for i, e in enumerate(self.universe)}
        idx = 0
        for e in elements:
            idx = idx * len(self.universe) + pos[e]
        return idx

    def holds(self, name: str, elements: tuple) -> bool:
        table = self.tables.get(name)
        if table is None:
            raise UnknownSymbol(name)
        sym = next(s for s in self.symbols if s.name == name)
        if len(elements) != sym.arity:
            raise InputError(f"{name} applied to {len(elements)} arguments, arity {sym.arity}")
        return table[self.index(sym, elements)]

    def true_tuples(self, name: str) -> list[tuple]:
        sym = next(s for s in self.symbols if s.name == name)
        rows = itertools.product(self.universe, repeat=sym.arity)
        return [t for t, b in zip(rows, self.tables[name]) if b]


# ----------------------------------------------------------------------------
# Evaluation

VariableBinding = Mapping[str, str]


def _resolve(term: Term, structure: FiniteStructure, binding: VariableBinding) -> str:
    if isinstance(term, Const):
        return structure.constant(term.name)
    try:
        return binding[term]
    except KeyError:
        raise UnboundVariable(term) from None


def eval_qf(structure: FiniteStructure, so: SOAssignment, binding: VariableBinding, f: Formula) -> bool:
    """Truth value of a quantifier-free formula under ``(structure, so)``."""
    if isinstance(f, FOAtom):
        args = tuple(_resolve(a, structure, binding) for a in f.args)
        return structure.holds(f.symbol, args)
    if isinstance(f, SOAtom):
        args = tuple(_resolve(a, structure, binding) for a in f.args)
        return so.holds(f.symbol, args)
    if isinstance(f, GroundAtom):
        return so.holds(f.symbol, f.elements)
    if isinstance(f, Eq):
        return _resolve(f.left, structure, binding) == _resolve(f.right, structure, binding)
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Not):
        return not eval_qf(structure, so, binding, f.arg)
    if isinstance(f, And):
        return all(eval_qf(structure, so, binding, a) for a in f.args)
    if isinstance(f, Or):
        return any(eval_qf(structure, so, binding, a) for a in f.args)
    if isinstance(f, PrenexUniversal):
        raise InputError("eval_qf requires a quantifier-free formula")
    raise TypeError(f"not a formula: {f!r}")


def satisfies(structure: FiniteStructure, so: SOAssignment, binding: VariableBinding, f: Formula) -> bool:
    """Like :func:`eval_qf` but also expands a prenex universal block."""
    if isinstance(f, PrenexUniversal):
        for values in itertools.product(structure.universe, repeat=len(f.variables)):
            inner = dict(binding)
            inner.update(zip(f.variables, values))
            if not eval_qf(structure, so, inner, f.matrix):
                return False
        return True
    return eval_qf(structure, so, binding, f)


def partial_eval(f: Formula, structure: FiniteStructure, binding: VariableBinding) -> Formula:
    """Evaluate first-order parts away, leaving a formula over ground SO atoms.

    The result contains only :class:`GroundAtom`, :class:`Truth`, ``Not``,
    ``And`` and ``Or``; constant subformulas are folded.
    """
    if isinstance(f, FOAtom):
        args = tuple(_resolve(a, structure, binding) for a in f.args)
        return TRUE if structure.holds(f.symbol, args) else FALSE
    if isinstance(f, Eq):
        same = _resolve(f.left, structure, binding) == _resolve(f.right, structure, binding)
        return TRUE if same else FALSE
    if isinstance(f, SOAtom):
        return GroundAtom(f.symbol, tuple(_resolve(a, structure, binding) for a in f.args))
    if isinstance(f, (GroundAtom, Truth)):
        return f
    if isinstance(f, Not):
        inner = partial_eval(f.arg, structure, binding)
        if isinstance(inner, Truth):
            return FALSE if inner.value else TRUE
        if isinstance(inner, Not):
            return inner.arg
        return Not(inner)
    if isinstance(f, And):
        kept = []
        for a in f.args:
            r = partial_eval(a, structure, binding)
            if r == FALSE:
                return FALSE
            if r != TRUE:
                kept.append(r)
        return conj(kept)
    if isinstance(f, Or):
        kept = []
        for a in f.args:
            r = partial_eval(a, structure, binding)
            if r == TRUE:
                return TRUE
            if r != FALSE:
                kept.append(r)
        return disj(kept)
    if isinstance(f, PrenexUniversal):
        raise InputError("partial_eval requires a quantifier-free formula")
    raise TypeError(f"not a formula: {f!r}")
