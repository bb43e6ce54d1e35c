"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (bypassing output capture)
and then asserts, so ``pytest tests/test_acceptance.py`` shows a summary even
without ``-s``.
"""

import random
import time
from fractions import Fraction

import pytest

from cli_cases import CASES, golden_text, run_case, scratch
from generators import horn_cnf, mh2s_family, random_lp, random_network
from synopt.flow import max_flow, min_cut_from_flow, verify_certificate
from synopt.ground import brute_sat, horn_sat
from synopt.lp import (
    Found,
    JointFeasibility,
    decide_optimal_pair,
    dual_feasible,
    make_dual,
    parse_lp,
    primal_feasible,
    verify_optimal_pair,
)
from synopt.maxhorn2sat import brute_force_opt, encode, horn_matrix, parse_mh2s
from synopt.normal_forms import check_equivalence, guarded_assignments, is_horn
from synopt.oracle import DecisionOracle, binary_search_opt, call_ceiling, lp_oracle
from synopt.syntactic import evaluate_max

M_TEXT = "p cnf 3 3\n1 -2 0\n3 0\n-3 -1 0\n"
BOX = "2 2\nc: 1 1\nb: 2 3\nA: 1 0; 0 1\n"


@pytest.fixture
def verdict(capsys):
    def report(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {number}. {title}" + (f": {detail}" if detail else ""))
        assert ok, detail
    return report


def test_1_raw_cnf_has_128_clauses_of_width_7(verdict, tmp_path):
    work = scratch(tmp_path)
    instances = {
        "pairs_a.cnf": "p cnf 3 3\n1 -2 0\n-2 3 0\n-3 -1 0\n",
        "pairs_b.cnf": "p cnf 4 4\n-1 -2 0\n2 -3 0\n-4 1 0\n3 -4 0\n",
        "pairs_c.cnf": "p cnf 2 1\n-1 -2 0\n",
    }
    horn_matrix.cache_clear()
    results = []
    for name, text in instances.items():
        (work / name).write_text(text)
        start = time.perf_counter()
        code, out, _ = run_case(["encode", name], work)
        elapsed = time.perf_counter() - start
        fields = dict(line.split("=", 1) for line in out.splitlines())
        results.append((code, fields.get("raw_clauses"), fields.get("raw_width"), elapsed))
    ok = all(r[:3] == (0, "128", "7") and r[3] < 1.0 for r in results)
    slowest = max(r[3] for r in results)
    verdict(1, "encode reports 128 raw clauses of 7 literals", ok,
            f"{len(results)} instances, slowest {slowest:.3f}s")


def test_2_simplified_encoder_is_horn_and_equivalent(verdict):
    horn_matrix.cache_clear()
    start = time.perf_counter()
    hm = horn_matrix()
    horn = all(is_horn(c) for c in hm.simplified.clauses)
    atoms = list(dict.fromkeys(a for c in hm.raw.clauses for a in (l.atom for l in c)))
    guarded = guarded_assignments(atoms, hm.axioms)
    same = check_equivalence(hm.simplified, hm.dnf, hm.axioms)
    elapsed = time.perf_counter() - start
    ok = horn and same and guarded == 16 and elapsed < 1.0
    verdict(2, "simplified clauses are Horn and equivalent to the DNF", ok,
            f"{len(hm.simplified.clauses)} clauses, {guarded} guarded assignments, {elapsed:.3f}s")


def test_3_encoding_round_trip(verdict):
    start = time.perf_counter()
    m = parse_mh2s(M_TEXT)
    m_enc, m_brute = evaluate_max(encode(m).instance).optimum, brute_force_opt(m)[0]
    count, mismatches = 0, []
    for inst in mh2s_family(3, 4):
        count += 1
        got, want = evaluate_max(encode(inst).instance).optimum, brute_force_opt(inst)[0]
        if got != want:
            mismatches.append((inst, got, want))
    elapsed = time.perf_counter() - start
    ok = m_enc == m_brute == 3 and not mismatches and elapsed < 300
    verdict(3, "evaluate_max(encode(I)) == brute_force_opt(I)", ok,
            f"M: {m_enc} vs {m_brute}; family of {count}, {len(mismatches)} mismatches, {elapsed:.1f}s")


def test_4_horn_sat_against_brute_force(verdict):
    start = time.perf_counter()
    rng = random.Random(4)
    disagreements = minimality_failures = checked_minimal = 0
    for _ in range(1000):
        n = rng.randint(1, 12)
        f = horn_cnf(rng, n, rng.randint(1, 24))
        res = horn_sat(f)
        if res.satisfiable != brute_sat(f)[0] or (res.satisfiable and not f.evaluate(res.model)):
            disagreements += 1
        if res.satisfiable and n <= 8:
            checked_minimal += 1
            for mask in range(1 << n):
                model = {i + 1 for i in range(n) if mask >> i & 1}
                if f.evaluate(model) and not res.model <= model:
                    minimality_failures += 1
                    break
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and minimality_failures == 0 and elapsed < 60
    verdict(4, "horn_sat agrees with brute_sat; least models are minimal", ok,
            f"1000 instances, {disagreements} disagreements, {checked_minimal} models checked "
            f"exhaustively, {minimality_failures} not minimal, {elapsed:.1f}s")


def test_5_strong_duality(verdict):
    start = time.perf_counter()
    rng = random.Random(5)
    found = infeasible = unbounded = failures = 0
    for _ in range(150):
        p = random_lp(rng)
        res = decide_optimal_pair(p)
        if isinstance(res, Found):
            found += 1
            if not (verify_optimal_pair(p, res.cert)
                    and p.objective(res.cert.x) == make_dual(p).objective(res.cert.y)):
                failures += 1
        elif res.reason == "primal-infeasible":
            infeasible += 1
            failures += primal_feasible(p)
        else:
            unbounded += 1
            failures += not primal_feasible(p) or dual_feasible(p)
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 120
    verdict(5, "optimal pairs satisfy strong duality; others are certified infeasible", ok,
            f"150 LPs: {found} found, {infeasible} primal-infeasible, {unbounded} unbounded, "
            f"{failures} failures, {elapsed:.1f}s")


def test_6_single_call_versus_binary_search(verdict):
    p = parse_lp(BOX)
    joint = JointFeasibility()
    res = decide_optimal_pair(p, joint)
    oracle = lp_oracle(p)
    search = binary_search_opt(oracle, 0, 10)
    ok = isinstance(res, Found) and res.objective == 5 and joint.calls == 1 \
        and search.optimum == 5 and oracle.calls >= 2
    verdict(6, "box LP: one joint decision versus binary search", ok,
            f"joint_feasibility_calls={joint.calls} binary_search_calls={oracle.calls} optimum={search.optimum}")


def test_7_max_flow_min_cut(verdict):
    start = time.perf_counter()
    rng = random.Random(7)
    value_mismatch = rejected = accepted_perturbations = perturbations = 0
    for _ in range(200):
        net = random_network(rng, rng.randint(2, 8))
        flow, value = max_flow(net)
        inner = [v for v in net.vertices if v not in (net.source, net.sink)]
        best = None
        for mask in range(1 << len(inner)):
            U = {net.source, *(v for i, v in enumerate(inner) if mask >> i & 1)}
            cap = sum((c for (u, v), c in net.capacity.items() if u in U and v not in U), Fraction(0))
            best = cap if best is None else min(best, cap)
        value_mismatch += value != best
        cut = min_cut_from_flow(net, flow)
        rejected += not verify_certificate(net, flow, cut).verdict
        for e, f in flow.items():
            if f == 0:
                continue
            for delta in (f, f / 2, min(f, Fraction(1, 1000))):
                perturbations += 1
                bent = dict(flow)
                bent[e] = f - delta
                accepted_perturbations += verify_certificate(net, bent, cut).verdict
    elapsed = time.perf_counter() - start
    ok = value_mismatch == 0 and rejected == 0 and accepted_perturbations == 0 and elapsed < 120
    verdict(7, "max flow equals min cut; certificates accepted, perturbations rejected", ok,
            f"200 networks, {value_mismatch} value mismatches, {rejected} rejected certificates, "
            f"{accepted_perturbations}/{perturbations} perturbations accepted, {elapsed:.1f}s")


def test_8_binary_search_call_bound(verdict):
    worst_excess, cases, wrong = None, 0, 0
    for length in range(1, 65):
        for t in range(length):
            oracle = DecisionOracle(lambda k, t=t: k <= t)
            res = binary_search_opt(oracle, 0, length - 1)
            cases += 1
            wrong += res.optimum != t
            excess = oracle.calls - call_ceiling(0, length - 1)
            worst_excess = excess if worst_excess is None else max(worst_excess, excess)
    ok = worst_excess <= 0 and wrong == 0
    verdict(8, "binary search stays within ceil(log2(hi - lo + 1)) calls", ok,
            f"{cases} monotone oracles, worst calls - ceiling = {worst_excess}, {wrong} wrong optima")


def test_9_cli_output_independent_of_workers(verdict, tmp_path):
    differing = []
    for name, (argv, _) in sorted(CASES.items()):
        outs = []
        for jobs in (1, 4):
            work = scratch(tmp_path / f"{name}_{jobs}")
            outs.append(run_case(argv, work, jobs=jobs)[1])
        if not outs[0] == outs[1] == golden_text(name):
            differing.append(name)
    ok = not differing
    verdict(9, "golden CLI outputs identical with 1 and 4 workers", ok,
            f"{len(CASES)} cases" + (f", differing: {', '.join(differing)}" if differing else ""))
