import random
from fractions import Fraction

import pytest

from generators import random_lp
from synopt.errors import LimitExceeded, ParseError
from synopt.lp import (
    CertificatePair,
    Found,
    JointFeasibility,
    LPPrimal,
    NoOptimalPair,
    check_cs,
    complementarity_patterns,
    decide_optimal_pair,
    dual_feasible,
    emit_horn_cs,
    fourier_motzkin_feasible,
    make_dual,
    objective_at_least,
    parse_certificate,
    parse_lp,
    pattern_pair,
    primal_feasible,
    verify_optimal_pair,
)
from synopt.normal_forms import Literal, is_horn

BOX = "2 2 / c: 1 1 / b: 2 3 / A: 1 0; 0 1"


def box():
    return parse_lp(BOX)


def test_parse_box():
    p = box()
    assert p.c == (1, 1) and p.b == (2, 3) and p.A == ((1, 0), (0, 1))
    assert parse_lp(p.to_text()) == p


def test_parse_rationals_and_errors():
    p = parse_lp("1 1\nc: 3/4\nb: -1/2\nA: 2/6\n")
    assert p.c == (Fraction(3, 4),) and p.A == ((Fraction(1, 3),),)
    with pytest.raises(ParseError):
        parse_lp("2 1 / c: 1 1 / b: 1 / A: 1 0 0")
    with pytest.raises(ParseError):
        parse_lp("1 1 / c: 1/0 / b: 1 / A: 1")


def test_dual_examples():
    d = make_dual(LPPrimal([1], [[1]], [1]))
    assert d.b == (1,) and d.At == ((1,),) and d.c == (1,)
    d = make_dual(box())
    assert d.b == (2, 3) and d.At == ((1, 0), (0, 1)) and d.c == (1, 1)


def test_dual_is_an_involution():
    rng = random.Random(21)
    for _ in range(100):
        p = random_lp(rng)
        assert make_dual(make_dual(p).to_primal()).to_primal() == p


def test_cs_examples():
    p = box()
    good = check_cs(p, CertificatePair((2, 3), (1, 1)))
    assert good.optimal and good.primal_objective == good.dual_objective == 5
    bad = check_cs(p, CertificatePair((0, 0), (1, 1)))
    assert not bad.rows[0].ok and bad.rows[0].product == 2
    assert not bad.cs_holds
    neg = check_cs(p, CertificatePair((-1, 0), (1, 1)))
    assert not neg.primal_feasible


def test_verify_examples():
    p = box()
    assert verify_optimal_pair(p, CertificatePair((2, 3), (1, 1)))
    assert not verify_optimal_pair(p, CertificatePair((0, 0), (1, 1)))
    assert not verify_optimal_pair(p, CertificatePair((3, 3), (1, 1)))


def test_certificate_parsing():
    p = box()
    assert parse_certificate("x: 2 3\ny: 1 1\n", p) == CertificatePair((2, 3), (1, 1))
    with pytest.raises(ParseError):
        parse_certificate("2 3 1", p)


def test_horn_certificate_examples():
    p = box()
    h = emit_horn_cs(p, CertificatePair((2, 3), (1, 1)))
    assert len(h.cnf.clauses) == 4 and h.holds()
    h = emit_horn_cs(p, CertificatePair((0, 0), (1, 1)))
    assert 0 in h.falsified()
    assert [str(a) for a in h.cnf.variables[:2]] == ["YnotEq0(1)", "B_AnotEq0(1)"]
    for c in h.cnf.clauses:
        assert is_horn(tuple(Literal(h.cnf.atom(l), l > 0) for l in c))


def test_horn_certificate_matches_cs_verdict():
    rng = random.Random(22)
    for _ in range(150):
        p = random_lp(rng)
        cert = CertificatePair([rng.randint(0, 2) for _ in range(p.n)], [rng.randint(0, 2) for _ in range(p.m)])
        assert emit_horn_cs(p, cert).holds() == check_cs(p, cert).cs_holds


def test_decide_examples():
    res = decide_optimal_pair(box())
    assert isinstance(res, Found)
    assert res.cert == CertificatePair((2, 3), (1, 1)) and res.objective == 5 and res.decision_calls == 1
    res = decide_optimal_pair(LPPrimal([1], [[1]], [-1]))
    assert isinstance(res, NoOptimalPair) and res.reason == "primal-infeasible"
    res = decide_optimal_pair(LPPrimal([1], [[0]], [1]))
    assert res.reason == "primal-unbounded" and not res.dual_feasible


def test_size_guard():
    p = LPPrimal([1] * 7, [[1] * 7] * 6, [1] * 6)
    with pytest.raises(LimitExceeded):
        decide_optimal_pair(p)


def test_fourier_motzkin_basics():
    assert fourier_motzkin_feasible([((1,), 1), ((-1,), 0)], 1)
    assert not fourier_motzkin_feasible([((1,), 0), ((-1,), -1)], 1)
    assert fourier_motzkin_feasible([((1, 1), 2), ((-1, 0), -1), ((0, -1), -1)], 2)
    assert not fourier_motzkin_feasible([((1, 1), 1), ((-1, 0), -1), ((0, -1), -1)], 2)


def test_found_pairs_are_optimal():
    rng = random.Random(23)
    found = 0
    for _ in range(120):
        p = random_lp(rng)
        oracle = JointFeasibility()
        res = decide_optimal_pair(p, oracle)
        assert oracle.calls == 1
        if isinstance(res, Found):
            found += 1
            assert verify_optimal_pair(p, res.cert)
            assert res.objective == make_dual(p).objective(res.cert.y)
            assert objective_at_least(p, res.objective)
            assert not objective_at_least(p, res.objective + Fraction(1, 1000))
            for pattern in complementarity_patterns(p.m, p.n):
                other = pattern_pair(p, pattern)
                if other is not None and check_cs(p, other).primal_feasible:
                    assert p.objective(other.x) <= res.objective
        elif res.reason == "primal-infeasible":
            assert not primal_feasible(p)
        else:
            assert primal_feasible(p) and not dual_feasible(p)
    assert found > 20
