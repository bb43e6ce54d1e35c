"""MAX Pi_0 / MAX Pi_1 evaluation by exhaustive second-order enumeration.

For each witness tuple the first-order part of the formula is evaluated
once, leaving a small residual formula over ground second-order atoms.  The
residuals are then evaluated for a whole block of assignments at a time with
numpy.  Assignment number ``a`` sets flat table position ``i`` (symbols in
signature order, tables row-major) to bit ``N-1-i`` of ``a``, so numeric
order is lexicographic order on the flattened tables with False < True.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError, LimitExceeded
from .logic import (
    And,
    FiniteStructure,
    Formula,
    GroundAtom,
    Not,
    Or,
    Query,
    SOAssignment,
    Truth,
    conj,
    partial_eval,
)

DEFAULT_LIMIT = 2 ** 24
CHUNK_BITS = 16


@dataclass(frozen=True)
class SyntacticInstance:
    structure: FiniteStructure
    query: Query

    def __post_init__(self):
        for s in self.query.vocab.symbols:
            if s.kind == "fo" and s.name not in self.structure.relations:
                raise InputError(f"relation {s.name} not interpreted by the structure")

    @property
    def signature(self):
        return self.query.so_symbols

    @property
    def table_bits(self) -> int:
        n = self.structure.size
        return sum(n ** s.arity for s in self.signature)

    @property
    def enumeration_size(self) -> int:
        return 2 ** self.table_bits


@dataclass(frozen=True)
class EvalResult:
    optimum: int
    assignment: SOAssignment
    examined: int


# ----------------------------------------------------------------------------
# Residuals are nested tuples so they pickle cheaply to worker processes:
#   ("v", i) | ("not", r) | ("and", rs) | ("or", rs) | True | False


def _encode(f: Formula, position: dict) -> object:
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, GroundAtom):
        return ("v", position[f])
    if isinstance(f, Not):
        return ("not", _encode(f.arg, position))
    if isinstance(f, (And, Or)):
        tag = "and" if isinstance(f, And) else "or"
        return (tag, tuple(_encode(a, position) for a in f.args))
    raise TypeError(f"unexpected residual node {f!r}")


def _positions(inst: SyntacticInstance) -> dict:
    universe = inst.structure.universe
    pos, i = {}, 0
    for s in inst.signature:
        for t in itertools.product(universe, repeat=s.arity):
            pos[GroundAtom(s.name, t)] = i
            i += 1
    return pos


def residuals(inst: SyntacticInstance) -> list[tuple[tuple, object]]:
    """(witness tuple, residual) for every witness whose residual is not constantly false."""
    q, st = inst.query, inst.structure
    position = _positions(inst)
    out = []
    for w in itertools.product(st.universe, repeat=len(q.free)):
        env = dict(zip(q.free, w))
        parts = []
        dead = False
        for x in itertools.product(st.universe, repeat=len(q.bound)):
            env.update(zip(q.bound, x))
            r = partial_eval(q.matrix, st, env)
            if r == Truth(False):
                dead = True
                break
            if r != Truth(True):
                parts.append(r)
        if dead:
            continue
        out.append((w, _encode(conj(dict.fromkeys(parts)), position)))
    return out


def _eval_block(r, cols, size):
    if r is True:
        return np.ones(size, dtype=bool)
    if r is False:
        return np.zeros(size, dtype=bool)
    tag = r[0]
    if tag == "v":
        return cols(r[1])
    if tag == "not":
        return ~_eval_block(r[1], cols, size)
    parts = [_eval_block(a, cols, size) for a in r[1]]
    return np.logical_and.reduce(parts) if tag == "and" else np.logical_or.reduce(parts)


def _count_block(res: list, nbits: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    cache = {}

    def cols(i):
        if i not in cache:
            cache[i] = ((idx >> (nbits - 1 - i)) & 1).astype(bool)
        return cache[i]

    counts = np.zeros(stop - start, dtype=np.int64)
    for r in res:
        counts += _eval_block(r, cols, stop - start)
    return counts


def _best_in_block(args) -> tuple[int, int]:
    res, nbits, start, stop = args
    counts = _count_block(res, nbits, start, stop)
    k = int(np.argmax(counts))
    return int(counts[k]), start + k


def _blocks(total: int):
    step = 1 << CHUNK_BITS
    for start in range(0, total, step):
        yield start, min(start + step, total)


def _check_limit(inst: SyntacticInstance, limit: int):
    size = inst.enumeration_size
    if size > limit:
        raise LimitExceeded(
            f"enumeration size 2^{inst.table_bits} = {size} exceeds limit {limit}", size, limit)


def _assignment(inst: SyntacticInstance, index: int) -> SOAssignment:
    n = inst.table_bits
    bits = [(index >> (n - 1 - i)) & 1 for i in range(n)]
    return SOAssignment.from_flat(inst.structure.universe, inst.signature, bits)


def evaluate_max(inst: SyntacticInstance, limit: int = DEFAULT_LIMIT, jobs: int = 1) -> EvalResult:
    """Exact maximum over all SO assignments of the number of satisfying witness tuples.

    Ties go to the lexicographically smallest flattened truth table.  With
    ``jobs > 1`` blocks of the assignment space are scored in worker
    processes; the merge (max count, then smallest index) makes the result
    independent of the worker count.
    """
    _check_limit(inst, limit)
    res = [r for _, r in residuals(inst)]
    nbits, total = inst.table_bits, inst.enumeration_size
    tasks = [(res, nbits, a, b) for a, b in _blocks(total)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_best_in_block, tasks))
    else:
        results = [_best_in_block(t) for t in tasks]
    best, index = max(results, key=lambda ci: (ci[0], -ci[1]))
    return EvalResult(best, _assignment(inst, index), total)


def decide_max(inst: SyntacticInstance, k: int, limit: int = DEFAULT_LIMIT) -> bool:
    """Is there an SO assignment under which at least ``k`` witness tuples hold?"""
    _check_limit(inst, limit)
    if k <= 0:
        return True
    res = [r for _, r in residuals(inst)]
    if len(res) < k:
        return False
    nbits = inst.table_bits
    for a, b in _blocks(inst.enumeration_size):
        if (_count_block(res, nbits, a, b) >= k).any():
            return True
    return False


def witnesses(inst: SyntacticInstance, so: SOAssignment) -> list[tuple]:
    """Witness tuples satisfied under a given assignment (for reports)."""
    flat = so.flat()
    return [w for w, r in residuals(inst) if _eval_scalar(r, flat)]


def _eval_scalar(r, flat) -> bool:
    if r is True or r is False:
        return r
    tag = r[0]
    if tag == "v":
        return flat[r[1]]
    if tag == "not":
        return not _eval_scalar(r[1], flat)
    vals = (_eval_scalar(a, flat) for a in r[1])
    return all(vals) if tag == "and" else any(vals)
