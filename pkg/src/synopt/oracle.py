"""Decision oracles, binary search over objective values, and direct (one-shot) solving."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import InputError, NoOptimum
from . import flow as flow_mod
from . import lp as lp_mod
from . import maxhorn2sat as mh2s


class DecisionOracle:
    """``ask(k)``: is the optimum at least ``k``?  Every question is counted."""

    def __init__(self, ask: Callable[[int], bool], name: str = "oracle"):
        self._ask = ask
        self.name = name
        self.calls = 0

    def ask(self, k: int) -> bool:
        self.calls += 1
        return bool(self._ask(k))


@dataclass(frozen=True)
class SearchOutcome:
    optimum: int
    calls: int
    lo: int
    hi: int

    @property
    def ceiling(self) -> int:
        return call_ceiling(self.lo, self.hi)


def call_ceiling(lo: int, hi: int) -> int:
    return math.ceil(math.log2(hi - lo + 1)) if hi > lo else 0


def binary_search_opt(oracle: DecisionOracle, lo: int, hi: int) -> SearchOutcome:
    """Largest ``k`` in ``[lo, hi]`` with ``ask(k)`` true, given that ``ask(lo)`` holds.

    Uses at most ``ceil(log2(hi - lo + 1))`` questions.  ``ask(lo)`` is never
    needed for the answer; it is checked only when every answer was no and
    the budget still has a question to spare.
    """
    if lo > hi:
        raise InputError(f"empty search range [{lo}, {hi}]")
    start = oracle.calls
    budget = call_ceiling(lo, hi)
    a, b = lo, hi
    confirmed = False
    while a < b:
        mid = (a + b + 1) // 2
        if oracle.ask(mid):
            a = mid
            confirmed = True
        else:
            b = mid - 1
    if not confirmed and lo < hi and oracle.calls - start < budget:
        if not oracle.ask(lo):
            raise InputError(f"precondition violated: ask({lo}) is false")
    return SearchOutcome(a, oracle.calls - start, lo, hi)


# ----------------------------------------------------------------------------
# Registered problems


def mh2s_oracle(inst: mh2s.MH2SInstance) -> DecisionOracle:
    return DecisionOracle(lambda k: mh2s.decision_oracle(inst, k), "maxhorn2sat")


def lp_oracle(p: lp_mod.LPPrimal) -> DecisionOracle:
    return DecisionOracle(lambda k: lp_mod.objective_at_least(p, k), "lp")


def flow_oracle(net: flow_mod.FlowNetwork) -> DecisionOracle:
    def ask(k):
        _, value = flow_mod.max_flow(net)
        return value >= k
    return DecisionOracle(ask, "maxflow")


def default_bounds(problem: str, instance) -> tuple[int, int]:
    """A search range that contains the optimum of an integer-valued instance."""
    if problem == "maxhorn2sat":
        return 0, len(instance.clauses)
    if problem == "maxflow":
        out = sum((c for (u, _), c in instance.capacity.items() if u == instance.source), Fraction(0))
        return 0, math.floor(out)
    raise InputError(f"no default search bounds for {problem!r}; pass them explicitly")


@dataclass(frozen=True)
class Solution:
    problem: str
    value: Fraction | int
    lines: tuple[str, ...]

    def __str__(self):
        return "\n".join(self.lines)


def solve_model1(problem: str, instance) -> Solution:
    """Return an optimal solution, or raise :class:`NoOptimum` (the "crash")."""
    if problem == "maxhorn2sat":
        value, assignment = mh2s.brute_force_opt(instance)
        text = " ".join(f"z{i}={'T' if b else 'F'}" for i, b in enumerate(assignment, 1))
        return Solution(problem, value, (f"value={value}", f"assignment={text}"))
    if problem == "maxflow":
        fl, value = flow_mod.max_flow(instance)
        return Solution(problem, value, (f"value={lp_mod.fmt(value)}", *flow_mod.format_flow(instance, fl)))
    if problem == "lp":
        res = lp_mod.decide_optimal_pair(instance)
        if isinstance(res, lp_mod.NoOptimalPair):
            raise NoOptimum(res.reason)
        return Solution(problem, res.objective, (
            f"value={lp_mod.fmt(res.objective)}",
            f"x={lp_mod.fmt_vec(res.cert.x)}",
            f"y={lp_mod.fmt_vec(res.cert.y)}",
        ))
    raise InputError(f"unregistered problem {problem!r}")
