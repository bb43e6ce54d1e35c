"""Clause forms, DNF-to-CNF distribution, Horn tests and axiom-driven simplification.

Atoms are any formula atom nodes from :mod:`synopt.logic`; they are treated
as opaque propositional letters here.  Entailment and equivalence are decided
by truth tables stored as Python integers used as bitsets, one bit per
assignment of the atoms involved.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import LimitExceeded
from .logic import (
    ATOMS,
    And,
    FOAtom,
    Formula,
    GroundAtom,
    Not,
    Or,
    SOAtom,
    Truth,
    Vocabulary,
    atoms as formula_atoms,
    conj,
    disj,
)
from .parser import format_formula

MAX_TABLE_ATOMS = 24
DEFAULT_DISTRIBUTION_CAP = 2 ** 20


@dataclass(frozen=True)
class Literal:
    atom: Formula
    positive: bool = True

    def __neg__(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def to_formula(self) -> Formula:
        return self.atom if self.positive else Not(self.atom)

    def __str__(self):
        text = format_formula(self.atom)
        return text if self.positive else "!" + text


def pos(atom) -> Literal:
    return Literal(atom, True)


def neg(atom) -> Literal:
    return Literal(atom, False)


Clause = tuple  # tuple[Literal, ...], duplicates removed, first occurrence kept


def make_clause(lits: Iterable[Literal]) -> Clause:
    return tuple(dict.fromkeys(lits))


def literal_key(lit: Literal) -> tuple:
    return (format_formula(lit.atom), not lit.positive)


def clause_key(c: Clause) -> tuple:
    return tuple(sorted(literal_key(l) for l in c))


def is_tautology(c: Clause) -> bool:
    s = set(c)
    return any(-l in s for l in c)


@dataclass(frozen=True)
class ClauseForm:
    """A CNF (conjunction of disjunctions) or DNF (disjunction of conjunctions).

    ``raw`` keeps the clauses as produced, before duplicate literals were
    merged; it is empty when the form was built directly.
    """

    kind: str
    clauses: tuple[Clause, ...]
    raw: tuple[tuple[Literal, ...], ...] = ()

    def __post_init__(self):
        if self.kind not in ("cnf", "dnf"):
            raise ValueError(f"kind must be 'cnf' or 'dnf', not {self.kind!r}")

    def __len__(self):
        return len(self.clauses)

    def atoms(self) -> list[Formula]:
        return list(dict.fromkeys(l.atom for c in self.clauses for l in c))

    def to_formula(self) -> Formula:
        inner, outer = (disj, conj) if self.kind == "cnf" else (conj, disj)
        return outer(inner(l.to_formula() for l in c) for c in self.clauses)

    def __str__(self):
        inner, outer = (" | ", " & ") if self.kind == "cnf" else (" & ", " | ")
        return outer.join("(" + inner.join(str(l) for l in c) + ")" for c in self.clauses)


def cnf(clauses: Iterable[Iterable[Literal]]) -> ClauseForm:
    return ClauseForm("cnf", tuple(make_clause(c) for c in clauses))


def dnf(conjuncts: Iterable[Iterable[Literal]]) -> ClauseForm:
    return ClauseForm("dnf", tuple(make_clause(c) for c in conjuncts))


@dataclass(frozen=True)
class AxiomSet:
    """Clauses assumed valid in context; ``atoms`` lists context atoms they range over."""

    clauses: tuple[Clause, ...] = ()
    atoms: tuple[Formula, ...] = field(default=())

    @classmethod
    def exactly_one(cls, atoms: Sequence[Formula]) -> "AxiomSet":
        atoms = tuple(atoms)
        clauses = [make_clause(pos(a) for a in atoms)]
        for a, b in itertools.combinations(atoms, 2):
            clauses.append((neg(a), neg(b)))
        return cls(tuple(clauses), atoms)

    def all_atoms(self) -> list[Formula]:
        return list(dict.fromkeys([*self.atoms, *(l.atom for c in self.clauses for l in c)]))


EMPTY_AXIOMS = AxiomSet()


# ----------------------------------------------------------------------------


def dnf_to_cnf(d: ClauseForm, cap: int = DEFAULT_DISTRIBUTION_CAP) -> ClauseForm:
    """Distribute a DNF into CNF, one literal picked from each conjunct.

    Clauses come out in lexicographic choice order (``itertools.product``
    over the conjuncts), so the first clause takes every conjunct's first
    literal.
    """
    if d.kind != "dnf":
        raise ValueError("dnf_to_cnf expects a DNF")
    if not d.clauses or any(not c for c in d.clauses):
        raise ValueError("DNF must be nonempty with nonempty conjuncts")
    size = math.prod(len(c) for c in d.clauses)
    if size > cap:
        raise LimitExceeded(f"distribution too large: {size} clauses > cap {cap}", size, cap)
    raw = tuple(itertools.product(*d.clauses))
    return ClauseForm("cnf", tuple(make_clause(r) for r in raw), raw)


def _is_second_order(atom, vocab: Vocabulary | None) -> bool:
    if isinstance(atom, (SOAtom, GroundAtom)):
        return True
    if isinstance(atom, FOAtom) and vocab is not None:
        return vocab.is_second_order(atom.symbol)
    return False


def is_horn(c: Clause, vocab: Vocabulary | None = None) -> bool:
    """At most one positive second-order literal; first-order literals don't count."""
    return sum(1 for l in c if l.positive and _is_second_order(l.atom, vocab)) <= 1


# ----------------------------------------------------------------------------
# Truth tables as bitsets


class _Table:
    """Bit ``a`` of every mask is the value under assignment number ``a``."""

    def __init__(self, atoms: Sequence[Formula]):
        atoms = list(dict.fromkeys(atoms))
        if len(atoms) > MAX_TABLE_ATOMS:
            raise LimitExceeded(
                f"atom bound exceeded: {len(atoms)} atoms > {MAX_TABLE_ATOMS}",
                len(atoms), MAX_TABLE_ATOMS)
        self.atoms = atoms
        self.n = len(atoms)
        self.size = 1 << self.n
        self.full = (1 << self.size) - 1
        self.masks = {a: _column(i, self.n) for i, a in enumerate(atoms)}

    def literal(self, lit: Literal) -> int:
        m = self.masks[lit.atom]
        return m if lit.positive else self.full & ~m

    def clause(self, c: Clause, kind: str = "cnf") -> int:
        if kind == "cnf":
            out = 0
            for l in c:
                out |= self.literal(l)
            return out
        out = self.full
        for l in c:
            out &= self.literal(l)
        return out

    def form(self, f: ClauseForm) -> int:
        if f.kind == "cnf":
            out = self.full
            for c in f.clauses:
                out &= self.clause(c, "cnf")
            return out
        out = 0
        for c in f.clauses:
            out |= self.clause(c, "dnf")
        return out

    def formula(self, f: Formula) -> int:
        if isinstance(f, Truth):
            return self.full if f.value else 0
        if isinstance(f, ATOMS):
            return self.masks[f]
        if isinstance(f, Not):
            return self.full & ~self.formula(f.arg)
        if isinstance(f, And):
            out = self.full
            for a in f.args:
                out &= self.formula(a)
            return out
        if isinstance(f, Or):
            out = 0
            for a in f.args:
                out |= self.formula(a)
            return out
        raise TypeError(f"propositional formula expected, got {f!r}")

    def axioms(self, ax: AxiomSet) -> int:
        out = self.full
        for c in ax.clauses:
            out &= self.clause(c)
        return out


def _column(i: int, n: int) -> int:
    """Mask of assignments (over ``n`` atoms) in which atom ``i`` is true."""
    half = 1 << i
    period = half << 1
    block = ((1 << half) - 1) << half
    total = 1 << n
    return block * (((1 << total) - 1) // ((1 << period) - 1))


def _atoms_of(x) -> list[Formula]:
    if isinstance(x, ClauseForm):
        return x.atoms()
    return list(formula_atoms(x))


def _mask(table: _Table, x) -> int:
    return table.form(x) if isinstance(x, ClauseForm) else table.formula(x)


def guarded_assignments(atoms: Sequence[Formula], axioms: AxiomSet = EMPTY_AXIOMS) -> int:
    """Number of truth assignments to ``atoms`` (plus axiom atoms) satisfying the axioms."""
    table = _Table([*atoms, *axioms.all_atoms()])
    return bin(table.axioms(axioms)).count("1")


def check_equivalence(f, g, axioms: AxiomSet = EMPTY_AXIOMS) -> bool:
    """True iff ``f`` and ``g`` agree on every assignment satisfying ``axioms``.

    ``f`` and ``g`` may be formulas or clause forms.
    """
    table = _Table([*_atoms_of(f), *_atoms_of(g), *axioms.all_atoms()])
    diff = _mask(table, f) ^ _mask(table, g)
    return diff & table.axioms(axioms) == 0


def simplify_cnf(f: ClauseForm, axioms: AxiomSet = EMPTY_AXIOMS) -> ClauseForm:
    """Drop clauses entailed by the axioms together with the remaining clauses.

    Tautologies go first.  Candidates are then tried widest-first (ties in
    lexicographic order), so a clause subsumed by a narrower one is removed
    before the narrower one can be.  Passes repeat until nothing changes;
    surviving clauses keep their original relative order.
    """
    if f.kind != "cnf":
        raise ValueError("simplify_cnf expects a CNF")
    table = _Table([*f.atoms(), *axioms.all_atoms()])
    ax = table.axioms(axioms)
    masks = [table.clause(c) for c in f.clauses]
    alive = [not is_tautology(c) for c in f.clauses]
    order = sorted(range(len(f.clauses)), key=lambda i: (-len(f.clauses[i]), clause_key(f.clauses[i]), i))
    changed = True
    while changed:
        changed = False
        for i in order:
            if not alive[i]:
                continue
            rest = ax
            for j, m in enumerate(masks):
                if alive[j] and j != i:
                    rest &= m
            if rest & ~masks[i] & table.full == 0:
                alive[i] = False
                changed = True
    kept = tuple(c for c, a in zip(f.clauses, alive) if a)
    return ClauseForm("cnf", kept)


def entails(premises: ClauseForm, c: Clause, axioms: AxiomSet = EMPTY_AXIOMS) -> bool:
    table = _Table([*premises.atoms(), *(l.atom for l in c), *axioms.all_atoms()])
    return table.axioms(axioms) & table.form(premises) & ~table.clause(c) & table.full == 0
