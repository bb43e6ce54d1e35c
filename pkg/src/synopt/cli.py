"""Command-line entry point.

Exit codes: 0 success / verdict true, 1 verdict false, 2 usage or input
error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import flow as fl
from . import ground as gr
from . import lp
from . import maxhorn2sat as mh
from . import oracle as orc
from .errors import InputError, LimitExceeded, NoOptimum, WorkbenchError
from .logic import atoms as atoms_of
from .normal_forms import AxiomSet, check_equivalence, guarded_assignments
from .parser import _Cursor, _FormulaParser, parse_formula, parse_structure
from .syntactic import DEFAULT_LIMIT, SyntacticInstance, evaluate_max, witnesses

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


class Output:
    """Collects ``key=value`` records plus optional human-oriented lines."""

    def __init__(self, structured: bool):
        self.structured = structured
        self.lines: list[str] = []

    def kv(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = str(value).lower()
        self.lines.append(f"{key}={value}")

    def raw(self, line: str) -> None:
        self.lines.append(line)

    def note(self, line: str) -> None:
        if not self.structured:
            self.lines.append(line)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _tuples(ts) -> str:
    return " ".join("(" + ",".join(t) + ")" for t in ts) if ts else "{}"


def _problem_of(path: str, given: str | None) -> str:
    if given:
        return given
    suffix = Path(path).suffix
    try:
        return {".cnf": "maxhorn2sat", ".lp": "lp", ".net": "maxflow"}[suffix]
    except KeyError:
        raise InputError(f"cannot infer problem from {path!r}; use --problem") from None


# ----------------------------------------------------------------------------


def cmd_eval(args, out: Output) -> int:
    structure = parse_structure(_read(args.structure))
    query = parse_formula(_read(args.formula), structure.vocab)
    inst = SyntacticInstance(structure, query)
    res = evaluate_max(inst, limit=args.limit, jobs=args.jobs)
    out.kv("optimum", res.optimum)
    out.kv("examined", res.examined)
    out.kv("class", "MAX Pi_1" if query.is_pi1 else "MAX Pi_0")
    for s in inst.signature:
        out.kv(f"witness.{s.name}", _tuples(res.assignment.true_tuples(s.name)))
    out.kv("satisfied", _tuples(witnesses(inst, res.assignment)))
    return EXIT_OK


def cmd_encode(args, out: Output) -> int:
    inst = mh.parse_mh2s(_read(args.cnf))
    if args.dedupe:
        inst = mh.dedupe(inst)
    enc = mh.encode(inst)
    prefix = args.out or str(Path(args.cnf).with_suffix(""))
    fms, fml = prefix + ".fms", prefix + ".fml"
    Path(fms).write_text(enc.structure_text(), encoding="utf-8")
    Path(fml).write_text(enc.formula_text(), encoding="utf-8")
    out.kv("variables", inst.num_vars)
    out.kv("clauses", len(inst.clauses))
    out.kv("raw_clauses", enc.raw_clauses)
    out.kv("raw_width", enc.raw_width)
    out.kv("simplified_clauses", enc.simplified_clauses)
    out.kv("guard_clauses", enc.guard_clauses)
    out.kv("dummy_clauses", enc.dummy_clauses)
    out.kv("horn", mh.encoded_clauses_horn(enc))
    out.kv("structure", fms)
    out.kv("formula", fml)
    return EXIT_OK


def cmd_mh2s_opt(args, out: Output) -> int:
    inst = mh.parse_mh2s(_read(args.cnf))
    value, assignment = mh.brute_force_opt(inst, jobs=args.jobs)
    out.kv("optimum", value)
    out.kv("assignment", " ".join(f"z{i}={'T' if b else 'F'}" for i, b in enumerate(assignment, 1)))
    return EXIT_OK


def cmd_search(args, out: Output) -> int:
    problem = _problem_of(args.instance, args.problem)
    text = _read(args.instance)
    instance = {"maxhorn2sat": mh.parse_mh2s, "lp": lp.parse_lp, "maxflow": fl.parse_network}[problem](text)
    if args.lo is None or args.hi is None:
        lo, hi = orc.default_bounds(problem, instance)
        lo = lo if args.lo is None else args.lo
        hi = hi if args.hi is None else args.hi
    else:
        lo, hi = args.lo, args.hi
    oracle = {"maxhorn2sat": orc.mh2s_oracle, "lp": orc.lp_oracle, "maxflow": orc.flow_oracle}[problem](instance)
    res = orc.binary_search_opt(oracle, lo, hi)
    out.kv("problem", problem)
    out.kv("lo", lo)
    out.kv("hi", hi)
    out.kv("optimum", res.optimum)
    out.kv("oracle_calls", res.calls)
    out.kv("call_ceiling", res.ceiling)
    if problem == "lp":
        joint = lp.JointFeasibility()
        decided = lp.decide_optimal_pair(instance, joint)
        out.kv("joint_feasibility_calls", joint.calls)
        if isinstance(decided, lp.Found):
            out.kv("exact_optimum", lp.fmt(decided.objective))
        else:
            out.kv("exact_optimum", f"none({decided.reason})")
    return EXIT_OK


def cmd_lp_dual(args, out: Output) -> int:
    p = lp.parse_lp(_read(args.lp))
    d = lp.make_dual(p)
    out.kv("sense", "minimize")
    out.kv("objective", lp.fmt_vec(d.b))
    for j, row in enumerate(d.At, 1):
        out.kv(f"constraint.{j}", f"{lp.fmt_vec(row)} >= {lp.fmt(d.c[j - 1])}")
    out.kv("sign", "y >= 0")
    back = lp.make_dual(d.to_primal()).to_primal()
    out.kv("dual_of_dual_is_primal", back == p)
    return EXIT_OK


def cmd_lp_verify(args, out: Output) -> int:
    p = lp.parse_lp(_read(args.lp))
    cert = lp.parse_certificate(_read(args.cert), p)
    report = lp.check_cs(p, cert)
    for line in report.lines():
        out.raw(line)
    horn = lp.emit_horn_cs(p, cert)
    out.kv("horn_clauses", len(horn.cnf.clauses))
    out.kv("horn_satisfied", horn.holds())
    if args.dimacs:
        Path(args.dimacs).write_text(gr.to_dimacs(horn.cnf), encoding="utf-8")
    ok = lp.verify_optimal_pair(p, cert)
    out.kv("verdict", "optimal" if ok else "rejected")
    po, do = lp.fmt(report.primal_objective), lp.fmt(report.dual_objective)
    out.note(f"objectives {po} {'=' if po == do else '!='} {do}")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_lp_decide(args, out: Output) -> int:
    p = lp.parse_lp(_read(args.lp))
    res = lp.decide_optimal_pair(p)
    if isinstance(res, lp.Found):
        out.kv("status", "found")
        out.kv("x", lp.fmt_vec(res.cert.x))
        out.kv("y", lp.fmt_vec(res.cert.y))
        out.kv("objective", lp.fmt(res.objective))
        out.kv("decision_calls", res.decision_calls)
        return EXIT_OK
    out.kv("status", "no-optimal-pair")
    out.kv("reason", res.reason)
    out.kv("dual_feasible", res.dual_feasible)
    out.kv("decision_calls", res.decision_calls)
    return EXIT_FALSE


def cmd_flow_solve(args, out: Output) -> int:
    net = fl.parse_network(_read(args.net))
    flow, value = fl.max_flow(net)
    cut = fl.min_cut_from_flow(net, flow)
    out.kv("value", lp.fmt(value))
    for u, v in net.capacity:
        out.kv(f"flow.{u}->{v}", lp.fmt(flow[(u, v)]))
    out.kv("cut", " ".join(fl.sorted_cut(net, cut)))
    out.kv("cut_capacity", lp.fmt(fl.cut_capacity(net, cut)))
    out.kv("certificate", "accepted" if fl.verify_certificate(net, flow, cut).verdict else "rejected")
    return EXIT_OK


def cmd_flow_verify(args, out: Output) -> int:
    net = fl.parse_network(_read(args.net))
    flow = fl.parse_flow(_read(args.flow), net)
    cut = fl.parse_cut(_read(args.cut), net)
    report = fl.verify_certificate(net, flow, cut)
    for line in report.lines():
        out.raw(line)
    out.kv("verdict", "accepted" if report.verdict else "rejected")
    if not report.verdict:
        out.note("failing conditions: " + ", ".join(report.failed))
    return EXIT_OK if report.verdict else EXIT_FALSE


def cmd_horn_sat(args, out: Output) -> int:
    cnf = gr.parse_dimacs(_read(args.cnf))
    res = gr.horn_sat(cnf)
    out.kv("status", "SAT" if res.satisfiable else "UNSAT")
    if res.satisfiable:
        out.kv("model", " ".join(str(a) for a in res.atoms(cnf)) or "{}")
        return EXIT_OK
    out.kv("conflict_clause", res.conflict + 1)
    out.kv("conflict", cnf.format_clause(cnf.clauses[res.conflict]))
    return EXIT_FALSE


def _bindings(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise InputError(f"--bind expects var=element, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_ground(args, out: Output) -> int:
    structure = parse_structure(_read(args.structure))
    query = parse_formula(_read(args.formula), structure.vocab)
    binding = _bindings(args.bind)
    bad = [e for e in binding.values() if e not in structure.universe]
    if bad:
        raise InputError(f"element {bad[0]!r} not in universe")
    cnf = gr.ground(query, structure, binding)
    for line in gr.to_dimacs(cnf).splitlines():
        out.raw(line)
    for i, (c, prov) in enumerate(zip(cnf.clauses, cnf.provenance), 1):
        if not c:
            out.raw(f"c empty clause {i} from {prov}")
    return EXIT_OK


def _atoms_arg(text: str, vocab) -> list:
    if not text:
        return []
    cur = _Cursor(text)
    fp = _FormulaParser(cur, vocab)
    atoms = []
    while cur.tok.kind != "eof":
        a = fp.atom()
        atoms.append(a)
        if cur.at(","):
            cur.advance()
    return atoms


def cmd_equiv_check(args, out: Output) -> int:
    structure = parse_structure(_read(args.structure))
    f = parse_formula(_read(args.left), structure.vocab)
    g = parse_formula(_read(args.right), structure.vocab)
    vocab = f.vocab.extend(s for s in g.so_symbols if not f.vocab.has(s.name))
    group = _atoms_arg(args.exactly_one or "", vocab)
    axioms = AxiomSet.exactly_one(group) if group else AxiomSet()
    lhs, rhs = f.matrix, g.matrix
    same = check_equivalence(lhs, rhs, axioms)
    letters = list(dict.fromkeys([*atoms_of(lhs), *atoms_of(rhs)]))
    out.kv("atoms", len(dict.fromkeys([*letters, *axioms.all_atoms()])))
    out.kv("assignments", guarded_assignments(letters, axioms))
    out.kv("equivalent", same)
    return EXIT_OK if same else EXIT_FALSE


# ----------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as :class:`InputError` so they share the one-line diagnostic."""

    def error(self, message):
        raise InputError(f"{message} (see '{self.prog} --help')")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--limit", type=_positive, default=DEFAULT_LIMIT,
                        help="cap on second-order assignments enumerated (default 2^24)")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    common.add_argument("--seed", type=int, default=0, help="reserved; no subcommand is randomized")
    common.add_argument("--format", choices=("text", "structured"), default="text")

    parser = _Parser(prog="synopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("eval", cmd_eval, "optimum of a counting formula over a structure")
    p.add_argument("structure")
    p.add_argument("formula")

    p = add("encode", cmd_encode, "encode a MaxHorn2Sat instance as .fms + .fml")
    p.add_argument("cnf")
    p.add_argument("--out", help="output prefix (default: input path without suffix)")
    p.add_argument("--dedupe", action="store_true", help="drop exact duplicate clauses first")

    p = add("mh2s-opt", cmd_mh2s_opt, "exhaustive MaxHorn2Sat optimum")
    p.add_argument("cnf")

    p = add("search", cmd_search, "binary search over a decision oracle")
    p.add_argument("instance")
    p.add_argument("--problem", choices=("maxhorn2sat", "lp", "maxflow"))
    p.add_argument("--lo", type=int)
    p.add_argument("--hi", type=int)

    p = add("lp-dual", cmd_lp_dual, "print the dual of an LP")
    p.add_argument("lp")

    p = add("lp-verify", cmd_lp_verify, "check a primal/dual pair by complementary slackness")
    p.add_argument("lp")
    p.add_argument("cert")
    p.add_argument("--dimacs", help="also write the Horn certificate CNF here")

    p = add("lp-decide", cmd_lp_decide, "find an optimal pair with one joint decision")
    p.add_argument("lp")

    p = add("flow-solve", cmd_flow_solve, "maximum flow and a minimum cut")
    p.add_argument("net")

    p = add("flow-verify", cmd_flow_verify, "check a flow/cut optimality certificate")
    p.add_argument("net")
    p.add_argument("flow")
    p.add_argument("cut")

    p = add("horn-sat", cmd_horn_sat, "least model of a Horn DIMACS CNF")
    p.add_argument("cnf")

    p = add("ground", cmd_ground, "ground a universal formula to DIMACS")
    p.add_argument("structure")
    p.add_argument("formula")
    p.add_argument("--bind", action="append", metavar="VAR=ELEM", help="value for a free variable")

    p = add("equiv-check", cmd_equiv_check, "propositional equivalence of two formula matrices")
    p.add_argument("structure")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--exactly-one", metavar="ATOMS", help="atoms of which exactly one holds")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # --help
        return EXIT_INPUT if e.code else EXIT_OK
    except InputError as e:
        print(f"synopt: {e}", file=stderr)
        return EXIT_INPUT
    out = Output(args.format == "structured")
    try:
        code = args.func(args, out)
    except LimitExceeded as e:
        print(f"synopt: resource cap exceeded: {e}", file=stderr)
        return EXIT_LIMIT
    except NoOptimum as e:
        print(f"synopt: {e}", file=stderr)
        return EXIT_FALSE
    except WorkbenchError as e:
        print(f"synopt: {e}", file=stderr)
        return EXIT_INPUT
    for line in out.lines:
        print(line, file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
