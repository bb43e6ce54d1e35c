import math

import pytest

from synopt.errors import InputError, NoOptimum
from synopt.flow import parse_network
from synopt.lp import LPPrimal, parse_lp
from synopt.maxhorn2sat import brute_force_opt, parse_mh2s
from synopt.oracle import (
    DecisionOracle,
    binary_search_opt,
    call_ceiling,
    default_bounds,
    flow_oracle,
    lp_oracle,
    mh2s_oracle,
    solve_model1,
)

M = parse_mh2s("p cnf 3 3\n1 -2 0\n3 0\n-3 -1 0\n")
DIAMOND = parse_network("source s\nsink t\nedge s a 3\nedge s b 2\nedge a t 2\nedge b t 3\n")
BOX = parse_lp("2 2 / c: 1 1 / b: 2 3 / A: 1 0; 0 1")


def threshold(t):
    return DecisionOracle(lambda k: k <= t)


def test_m_in_two_calls():
    res = binary_search_opt(mh2s_oracle(M), 0, 3)
    assert res.optimum == 3 and res.calls <= 2


def test_false_above_zero():
    res = binary_search_opt(threshold(0), 0, 7)
    assert res.optimum == 0 and res.calls <= 3


def test_degenerate_range():
    oracle = threshold(9)
    res = binary_search_opt(oracle, 5, 5)
    assert res.optimum == 5 and res.calls == 0 and oracle.calls == 0


def test_empty_range():
    with pytest.raises(InputError):
        binary_search_opt(threshold(0), 3, 2)


def test_precondition_violation_detected():
    with pytest.raises(InputError, match="precondition violated"):
        binary_search_opt(threshold(-1), 0, 2)


def test_every_monotone_oracle_within_ceiling():
    for length in range(1, 65):
        for lo in (0, -3, 11):
            hi = lo + length - 1
            assert call_ceiling(lo, hi) == math.ceil(math.log2(length))
            for t in range(lo - 1, hi + 1):
                oracle = threshold(t)
                try:
                    res = binary_search_opt(oracle, lo, hi)
                except InputError:
                    assert t < lo
                    continue
                assert oracle.calls == res.calls <= res.ceiling
                if t >= lo:
                    assert res.optimum == t


def test_matches_brute_force_on_registered_problems():
    lo, hi = default_bounds("maxhorn2sat", M)
    assert binary_search_opt(mh2s_oracle(M), lo, hi).optimum == brute_force_opt(M)[0]
    lo, hi = default_bounds("maxflow", DIAMOND)
    assert (lo, hi) == (0, 5)
    assert binary_search_opt(flow_oracle(DIAMOND), lo, hi).optimum == 4
    res = binary_search_opt(lp_oracle(BOX), 0, 10)
    assert res.optimum == 5 and res.calls >= 2
    with pytest.raises(InputError):
        default_bounds("lp", BOX)


def test_direct_solver():
    sol = solve_model1("maxhorn2sat", M)
    assert sol.value == 3 and "assignment=z1=F z2=F z3=T" in sol.lines
    assert solve_model1("maxflow", DIAMOND).value == 4
    assert solve_model1("lp", BOX).value == 5
    with pytest.raises(NoOptimum, match=r"no-optimum\(primal-unbounded\)"):
        solve_model1("lp", LPPrimal([1], [[0]], [1]))
    with pytest.raises(InputError):
        solve_model1("tsp", None)
