"""MaxHorn2Sat instances, an exhaustive optimum, and the quantifier-free Horn encoding.

The encoding turns an instance into a structure whose universe is the
instance's variables plus a dummy element ``d``, and a MAX Pi_0 counting
formula over pairs ``(x, y)`` with a single unary second-order predicate
``S``.  Each clause becomes one marked pair, so the number of satisfied
pairs under ``S`` equals the number of satisfied clauses under the
assignment ``S`` describes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, LimitExceeded, ParseError
from .logic import (
    Const,
    FiniteStructure,
    FOAtom,
    Not,
    Or,
    Query,
    SO,
    SOAtom,
    Symbol,
    Vocabulary,
    conj,
    disj,
)
from .ground import matrix_clauses
from .normal_forms import AxiomSet, ClauseForm, Literal, dnf, dnf_to_cnf, is_horn, neg, pos, simplify_cnf
from .parser import format_query, format_structure
from .syntactic import SyntacticInstance

MAX_BRUTE_VARS = 24
DUMMY = "d"

POS, NEG, POSNEG, NEGPOS, NEGNEG = "pos", "neg", "posneg", "negpos", "negneg"


@dataclass(frozen=True)
class MH2SClause:
    kind: str
    vars: tuple[int, ...]  # 1-based variable indices, in the order written

    def __post_init__(self):
        want = 1 if self.kind in (POS, NEG) else 2
        if self.kind not in (POS, NEG, POSNEG, NEGPOS, NEGNEG):
            raise InputError(f"unknown clause kind {self.kind!r}")
        if len(self.vars) != want:
            raise InputError(f"{self.kind} clause needs {want} variable(s)")
        if want == 2 and self.vars[0] == self.vars[1]:
            raise InputError(f"clause repeats variable z{self.vars[0]}")

    @property
    def literals(self) -> tuple[int, ...]:
        signs = {POS: (1,), NEG: (-1,), POSNEG: (1, -1), NEGPOS: (-1, 1), NEGNEG: (-1, -1)}[self.kind]
        return tuple(s * v for s, v in zip(signs, self.vars))

    def __str__(self):
        return " | ".join(("" if l > 0 else "!") + f"z{abs(l)}" for l in self.literals)


@dataclass(frozen=True)
class MH2SInstance:
    num_vars: int
    clauses: tuple[MH2SClause, ...]

    def __post_init__(self):
        for c in self.clauses:
            bad = [v for v in c.vars if not 1 <= v <= self.num_vars]
            if bad:
                raise InputError(f"unknown variable index {bad[0]}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f"z{i}" for i in range(1, self.num_vars + 1))

    def satisfied(self, assignment) -> int:
        """Clauses satisfied by ``assignment`` (sequence of bools, z1 first)."""
        return sum(any((l > 0) == bool(assignment[abs(l) - 1]) for l in c.literals) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, (*c.literals, 0))) for c in self.clauses]
        return "\n".join(lines) + "\n"


def clause_from_literals(lits) -> MH2SClause:
    lits = tuple(lits)
    if not lits:
        raise InputError("empty clause")
    if len(lits) > 2:
        raise InputError(f"too many literals ({len(lits)}); at most 2 allowed")
    if len(lits) == 1:
        return MH2SClause(POS if lits[0] > 0 else NEG, (abs(lits[0]),))
    a, b = lits
    if a > 0 and b > 0:
        raise InputError(f"non-Horn clause {a} {b}: two positive literals")
    kind = POSNEG if a > 0 else NEGPOS if b > 0 else NEGNEG
    return MH2SClause(kind, (abs(a), abs(b)))


def parse_mh2s(text: str) -> MH2SInstance:
    """Read the DIMACS-CNF subset: Horn clauses with at most two literals."""
    header = None
    clauses, current = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or header is not None:
                raise ParseError(f"line {lineno}: bad problem line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"line {lineno}: bad problem line {line!r}") from None
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                try:
                    clauses.append(clause_from_literals(current))
                except InputError as e:
                    raise ParseError(f"line {lineno}: {e}") from None
                current = []
                continue
            if abs(lit) > header[0]:
                raise ParseError(f"line {lineno}: unknown variable index {abs(lit)}")
            current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("last clause not terminated by 0")
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return MH2SInstance(header[0], tuple(clauses))


def dedupe(inst: MH2SInstance) -> MH2SInstance:
    """Drop exact repeats of a clause (same kind, same variables in the same order)."""
    return MH2SInstance(inst.num_vars, tuple(dict.fromkeys(inst.clauses)))


# ----------------------------------------------------------------------------
# Exhaustive optimum


def _scores(inst: MH2SInstance, start: int, stop: int) -> np.ndarray:
    n = inst.num_vars
    idx = np.arange(start, stop, dtype=np.int64)
    val = [None] + [((idx >> (n - v)) & 1).astype(bool) for v in range(1, n + 1)]
    score = np.zeros(stop - start, dtype=np.int64)
    for c in inst.clauses:
        sat = np.zeros(stop - start, dtype=bool)
        for l in c.literals:
            sat |= val[l] if l > 0 else ~val[-l]
        score += sat
    return score


def _best(args):
    inst, start, stop = args
    s = _scores(inst, start, stop)
    k = int(np.argmax(s))
    return int(s[k]), start + k


def _ranges(n: int, step: int = 1 << 16):
    total = 1 << n
    return [(a, min(a + step, total)) for a in range(0, total, step)]


def _check_size(inst: MH2SInstance):
    if inst.num_vars > MAX_BRUTE_VARS:
        raise LimitExceeded(
            f"too many variables for brute force: {inst.num_vars} > {MAX_BRUTE_VARS}",
            inst.num_vars, MAX_BRUTE_VARS)


def brute_force_opt(inst: MH2SInstance, jobs: int = 1) -> tuple[int, tuple[bool, ...]]:
    """Maximum number of satisfied clauses and the lexicographically smallest maximizer."""
    _check_size(inst)
    tasks = [(inst, a, b) for a, b in _ranges(inst.num_vars)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_best, tasks))
    else:
        results = [_best(t) for t in tasks]
    best, index = max(results, key=lambda r: (r[0], -r[1]))
    n = inst.num_vars
    return best, tuple(bool((index >> (n - v)) & 1) for v in range(1, n + 1))


def decision_oracle(inst: MH2SInstance, k: int) -> bool:
    """Is there an assignment satisfying at least ``k`` clauses?"""
    _check_size(inst)
    if k <= 0:
        return True
    if k > len(inst.clauses):
        return False
    return any((_scores(inst, a, b) >= k).any() for a, b in _ranges(inst.num_vars))


# ----------------------------------------------------------------------------
# Encoding

X, Y = "x", "y"
FPSN, FNSP, BOTHNEG, BOTHPOS = "FPSN", "FNSP", "BothNeg", "BothPos"
MARKS = ("L1", "L2", "L3", "L4")
CLAUSE_TYPES = (FPSN, FNSP, BOTHNEG, BOTHPOS)


@dataclass(frozen=True)
class HornMatrix:
    """The instance-independent part of the encoding."""

    dnf: ClauseForm
    raw: ClauseForm
    simplified: ClauseForm
    axioms: AxiomSet


@lru_cache(maxsize=None)
def horn_matrix() -> HornMatrix:
    A, B, C, D = (FOAtom(name, (X, Y)) for name in CLAUSE_TYPES)
    P, Q = SOAtom("S", (X,)), SOAtom("S", (Y,))
    phi = dnf([
        [pos(A), pos(P)], [pos(A), neg(Q)],
        [pos(B), neg(P)], [pos(B), pos(Q)],
        [pos(C), neg(P)], [pos(C), neg(Q)],
        [pos(D), pos(P)],
    ])
    raw = dnf_to_cnf(phi)
    axioms = AxiomSet.exactly_one([A, B, C, D])
    return HornMatrix(phi, raw, simplify_cnf(raw, axioms), axioms)


@dataclass(frozen=True)
class EncodedMH2S:
    instance: SyntacticInstance
    raw_clauses: int
    raw_width: int
    simplified_clauses: int
    guard_clauses: int = 1
    dummy_clauses: int = 1

    @property
    def structure(self) -> FiniteStructure:
        return self.instance.structure

    @property
    def query(self) -> Query:
        return self.instance.query

    def structure_text(self) -> str:
        return format_structure(self.structure)

    def formula_text(self) -> str:
        return format_query(self.query, wrap=True)


def _pair(c: MH2SClause) -> tuple[str, tuple[str, str]]:
    """Clause-type relation and ordered pair an instance clause is marked with."""
    z = [f"z{v}" for v in c.vars]
    if c.kind == POSNEG:
        return FPSN, (z[0], z[1])
    if c.kind == NEGPOS:
        return FNSP, (z[0], z[1])
    if c.kind == NEGNEG:
        return BOTHNEG, (z[0], z[1])
    if c.kind == POS:
        return BOTHPOS, (z[0], DUMMY)
    # a negative unit is the FNSP clause !z | d with d pinned to false
    return FNSP, (z[0], DUMMY)


def encode(inst: MH2SInstance) -> EncodedMH2S:
    mark = dict(zip(CLAUSE_TYPES, MARKS))
    rel = {name: set() for name in CLAUSE_TYPES + MARKS}
    seen = {}
    for c in inst.clauses:
        name, pair = _pair(c)
        if pair in seen:
            raise InputError(
                f"clauses '{seen[pair]}' and '{c}' share the ordered pair ({pair[0]},{pair[1]}); "
                "use --dedupe to drop exact duplicates")
        seen[pair] = str(c)
        rel[name].add(pair)
        rel[mark[name]].add(pair)

    symbols = tuple(Symbol(n, 2) for n in CLAUSE_TYPES + MARKS)
    vocab = Vocabulary(symbols, (DUMMY,))
    structure = FiniteStructure(
        inst.names + (DUMMY,),
        {n: frozenset(rel[n]) for n in CLAUSE_TYPES + MARKS},
        {DUMMY: DUMMY},
        vocab,
    )

    hm = horn_matrix()
    guard = Or(tuple(FOAtom(m, (X, Y)) for m in MARKS))
    pin = Not(SOAtom("S", (Const(DUMMY),)))
    body = conj([*(disj(l.to_formula() for l in c) for c in hm.simplified.clauses), guard, pin])
    query = Query((X, Y), body, vocab.extend([Symbol("S", 1, SO)]))
    raw_width = max(len(r) for r in hm.raw.raw)
    return EncodedMH2S(SyntacticInstance(structure, query), len(hm.raw.raw), raw_width,
                       len(hm.simplified.clauses))


def formula_clauses(enc: EncodedMH2S) -> list[tuple[Literal, ...]]:
    """The clauses of the emitted counting formula, as literal tuples."""
    out = []
    for lits in matrix_clauses(enc.query.matrix):
        out.append(tuple(Literal(l.arg, False) if isinstance(l, Not) else Literal(l, True) for l in lits))
    return out


def encoded_clauses_horn(enc: EncodedMH2S) -> bool:
    """Every clause of the emitted formula has at most one positive S-literal."""
    return all(is_horn(c, enc.query.vocab) for c in formula_clauses(enc))
