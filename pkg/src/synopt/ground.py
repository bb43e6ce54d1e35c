"""Grounding universal formulas to propositional CNF, and Horn satisfiability.

Propositional clauses use DIMACS conventions: variables are numbered from 1
and a literal is a signed integer.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import InputError, LimitExceeded, NotHorn, ParseError
from .logic import (
    ATOMS,
    And,
    FiniteStructure,
    Formula,
    GroundAtom,
    Not,
    Or,
    PrenexUniversal,
    Query,
    Truth,
    partial_eval,
)

BRUTE_MAX_VARS = 24


@dataclass(frozen=True)
class Provenance:
    binding: tuple[tuple[str, str], ...]
    source: int  # index of the matrix clause

    def __str__(self):
        b = ",".join(f"{k}={v}" for k, v in self.binding)
        return f"clause {self.source} @ {{{b}}}"


@dataclass(frozen=True)
class PropCNF:
    variables: tuple[GroundAtom, ...]
    clauses: tuple[tuple[int, ...], ...]
    provenance: tuple[Provenance | None, ...] = ()

    def __post_init__(self):
        if self.provenance and len(self.provenance) != len(self.clauses):
            raise ValueError("provenance must cover every clause")
        n = len(self.variables)
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > n:
                    raise InputError(f"literal {lit} out of range 1..{n}")

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def atom(self, lit: int) -> GroundAtom:
        return self.variables[abs(lit) - 1]

    def format_clause(self, c: Sequence[int]) -> str:
        if not c:
            return "<empty>"
        return " | ".join(("" if l > 0 else "!") + str(self.atom(l)) for l in c)

    def evaluate(self, true_vars) -> bool:
        true_vars = set(true_vars)
        return all(any((l > 0) == (abs(l) in true_vars) for l in c) for c in self.clauses)

    def evaluate_atoms(self, assignment: Mapping[GroundAtom, bool]) -> bool:
        truth = {i + 1 for i, a in enumerate(self.variables) if assignment.get(a, False)}
        return self.evaluate(truth)


class _Builder:
    def __init__(self):
        self.index: dict[GroundAtom, int] = {}
        self.clauses: list[tuple[int, ...]] = []
        self.provenance: list[Provenance | None] = []

    def var(self, atom: GroundAtom) -> int:
        if atom not in self.index:
            self.index[atom] = len(self.index) + 1
        return self.index[atom]

    def add(self, lits, prov=None):
        self.clauses.append(tuple(dict.fromkeys(lits)))
        self.provenance.append(prov)

    def build(self) -> PropCNF:
        atoms = tuple(sorted(self.index, key=self.index.get))
        return PropCNF(atoms, tuple(self.clauses), tuple(self.provenance))


def matrix_clauses(matrix: Formula) -> list[list[Formula]]:
    """Split a CNF matrix into lists of literal formulas; reject anything else."""

    def literal(f):
        return isinstance(f, ATOMS + (Truth,)) or (isinstance(f, Not) and isinstance(f.arg, ATOMS + (Truth,)))

    def clause(f) -> list[Formula]:
        if literal(f):
            return [f]
        if isinstance(f, Or):
            out = []
            for a in f.args:
                out.extend(clause(a))
            return out
        raise InputError(f"matrix not CNF: unexpected {type(f).__name__} inside a clause")

    def conjuncts(f) -> list[Formula]:
        if isinstance(f, And):
            out = []
            for a in f.args:
                out.extend(conjuncts(a))
            return out
        return [f]

    return [clause(c) for c in conjuncts(matrix)]


def ground(f: Formula | Query, structure: FiniteStructure, binding: Mapping[str, str] | None = None) -> PropCNF:
    """Instantiate a universal CNF formula over ``structure``.

    First-order literals are evaluated on the spot: a true one drops its
    clause, a false one drops itself.  An emptied clause is kept as the
    unsatisfiability marker.
    """
    binding = dict(binding or {})
    if isinstance(f, Query):
        missing = [v for v in f.free if v not in binding]
        if missing:
            raise InputError(f"unbound variable {missing[0]!r}")
        f = f.body
    if isinstance(f, PrenexUniversal):
        bound, matrix = f.variables, f.matrix
    else:
        bound, matrix = (), f
    clauses = matrix_clauses(matrix)
    b = _Builder()
    for values in itertools.product(structure.universe, repeat=len(bound)):
        env = dict(binding)
        env.update(zip(bound, values))
        key = tuple(sorted(env.items()))
        for ci, lits in enumerate(clauses):
            out, satisfied = [], False
            for lit in lits:
                g = partial_eval(lit, structure, env)
                if isinstance(g, Truth):
                    if g.value:
                        satisfied = True
                        break
                    continue
                if isinstance(g, Not):
                    out.append(-b.var(g.arg))
                else:
                    out.append(b.var(g))
            if not satisfied:
                b.add(out, Provenance(key, ci))
    return b.build()


# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class HornModel:
    satisfiable: bool
    model: frozenset[int] = frozenset()
    conflict: int | None = None  # index of a falsified clause

    def atoms(self, cnf: PropCNF) -> list[GroundAtom]:
        return [cnf.variables[v - 1] for v in sorted(self.model)]


def horn_sat(f: PropCNF) -> HornModel:
    """Unit propagation to the least model.

    Each clause keeps a count of body atoms not yet derived; an atom that
    becomes true decrements the counters of the clauses whose body mentions
    it, so total work is linear in the number of literal occurrences.
    """
    heads: list[int | None] = []
    pending: list[int] = []
    watch: dict[int, list[int]] = {}
    for ci, c in enumerate(f.clauses):
        positives = {l for l in c if l > 0}
        if len(positives) > 1:
            raise NotHorn(f.format_clause(c), ci)
        head = next(iter(positives), None)
        body = {-l for l in c if l < 0}
        heads.append(head)
        pending.append(len(body))
        for v in body:
            watch.setdefault(v, []).append(ci)

    true: set[int] = set()
    queue: deque[int] = deque()

    def fire(ci: int) -> bool:
        h = heads[ci]
        if h is None:
            return False
        if h not in true:
            true.add(h)
            queue.append(h)
        return True

    for ci, k in enumerate(pending):
        if k == 0 and not fire(ci):
            return HornModel(False, frozenset(true), ci)
    while queue:
        v = queue.popleft()
        for ci in watch.get(v, ()):
            pending[ci] -= 1
            if pending[ci] == 0 and not fire(ci):
                return HornModel(False, frozenset(true), ci)
    return HornModel(True, frozenset(true))


def _column(i: int, n: int) -> int:
    half = 1 << i
    block = ((1 << half) - 1) << half
    return block * (((1 << (1 << n)) - 1) // ((1 << (half << 1)) - 1))


def brute_sat(f: PropCNF) -> tuple[bool, frozenset[int] | None]:
    """Exhaustive satisfiability; the witness is the first model in counting order."""
    n = f.num_vars
    if n > BRUTE_MAX_VARS:
        raise LimitExceeded(f"bound exceeded: {n} variables > {BRUTE_MAX_VARS}", n, BRUTE_MAX_VARS)
    full = (1 << (1 << n)) - 1
    cols = [_column(i, n) for i in range(n)]
    sat = full
    for c in f.clauses:
        m = 0
        for l in c:
            m |= cols[l - 1] if l > 0 else full & ~cols[-l - 1]
        sat &= m
        if not sat:
            return False, None
    a = (sat & -sat).bit_length() - 1
    return True, frozenset(i + 1 for i in range(n) if a >> i & 1)


# ----------------------------------------------------------------------------
# DIMACS


def to_dimacs(f: PropCNF) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines += [f"c var {i} = {a}" for i, a in enumerate(f.variables, 1)]
    lines += [" ".join(map(str, (*c, 0))) for c in f.clauses]
    return "\n".join(lines) + "\n"


def _parse_atom(text: str) -> GroundAtom:
    text = text.strip()
    if "(" not in text:
        return GroundAtom(text, ())
    if not text.endswith(")"):
        raise ParseError(f"bad atom {text!r}")
    sym, rest = text.split("(", 1)
    return GroundAtom(sym.strip(), tuple(e.strip() for e in rest[:-1].split(",") if e.strip()))


def parse_dimacs(text: str) -> PropCNF:
    """Read DIMACS CNF; ``c var <n> = <Atom>`` comments name the variables."""
    names: dict[int, GroundAtom] = {}
    header = None
    clauses, current = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split(None, 3)
            if len(parts) == 4 and parts[1] == "var" and "=" in parts[3]:
                idx, atom = parts[2], parts[3].split("=", 1)[1]
                names[int(idx)] = _parse_atom(atom)
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: bad problem line")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(dict.fromkeys(current)))
                current = []
            else:
                if abs(lit) > header[0]:
                    raise ParseError(f"line {lineno}: variable {abs(lit)} exceeds declared {header[0]}")
                current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("last clause not terminated by 0")
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    variables = tuple(names.get(i, GroundAtom(f"x{i}", ())) for i in range(1, header[0] + 1))
    return PropCNF(variables, tuple(clauses), (None,) * len(clauses))
