"""Exact-rational LP primal/dual pairs and complementary-slackness certificates.

The primal is always ``max c.x  s.t.  Ax <= b, x >= 0`` and its dual
``min b.y  s.t.  A^T y >= c, y >= 0``.  Every number is a
:class:`fractions.Fraction`; there are no tolerances anywhere.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import InputError, InternalConsistencyError, LimitExceeded, ParseError
from .ground import PropCNF
from .logic import GroundAtom

MAX_PATTERN_SIZE = 12

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_vec(v) -> str:
    return " ".join(fmt(q) for q in v)


@dataclass(frozen=True)
class LPPrimal:
    c: Vector
    A: Matrix
    b: Vector

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(Fraction(v) for v in self.c))
        object.__setattr__(self, "b", tuple(Fraction(v) for v in self.b))
        object.__setattr__(self, "A", tuple(tuple(Fraction(v) for v in row) for row in self.A))
        if not self.c or not self.b:
            raise InputError("an LP needs m, n >= 1")
        if len(self.A) != len(self.b):
            raise InputError(f"A has {len(self.A)} rows, b has {len(self.b)} entries")
        for i, row in enumerate(self.A, 1):
            if len(row) != len(self.c):
                raise InputError(f"row {i} of A has {len(row)} entries, expected {len(self.c)}")

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def n(self) -> int:
        return len(self.c)

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.A)

    def objective(self, x) -> Fraction:
        return _dot(self.c, x)

    def to_text(self) -> str:
        rows = "; ".join(fmt_vec(r) for r in self.A)
        return f"{self.n} {self.m}\nc: {fmt_vec(self.c)}\nb: {fmt_vec(self.b)}\nA: {rows}\n"


@dataclass(frozen=True)
class LPDual:
    """``min b.y  s.t.  At y >= c, y >= 0``; ``At`` is the transpose of the primal's A."""

    b: Vector
    At: Matrix
    c: Vector

    def objective(self, y) -> Fraction:
        return _dot(self.b, y)

    def to_primal(self) -> LPPrimal:
        """The same problem written as a maximization in primal standard form."""
        return LPPrimal(tuple(-v for v in self.b), tuple(tuple(-v for v in row) for row in self.At),
                        tuple(-v for v in self.c))

    def to_text(self) -> str:
        lines = [f"minimize: {fmt_vec(self.b)}"]
        for j, row in enumerate(self.At, 1):
            lines.append(f"dual_row.{j}: {fmt_vec(row)} >= {fmt(self.c[j - 1])}")
        lines.append("sign: y >= 0")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CertificatePair:
    x: Vector
    y: Vector

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(Fraction(v) for v in self.x))
        object.__setattr__(self, "y", tuple(Fraction(v) for v in self.y))


_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(tok: str) -> Fraction:
    if not _RATIONAL.match(tok):
        raise ParseError(f"bad rational {tok!r}")
    if "/" in tok and int(tok.split("/")[1]) == 0:
        raise ParseError(f"zero denominator in {tok!r}")
    return Fraction(tok)


def parse_lp(text: str) -> LPPrimal:
    """Parse ``n m`` / ``c: ...`` / ``b: ...`` / ``A: row; row; ...``.

    Lines may be separated by newlines or by a standalone ``/``; rows of A by
    ``;`` or newlines.
    """
    text = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    text = re.sub(r"(?<!\S)/(?!\S)", "\n", text)
    head, sections, current = None, {}, None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        m = re.match(r"^([cbA])\s*:(.*)$", line)
        if m:
            current = m.group(1)
            if current in sections:
                raise ParseError(f"section {current}: given twice")
            sections[current] = [m.group(2)]
        elif head is None and current is None:
            head = line.split()
        elif current is not None:
            sections[current].append(line)
        else:
            raise ParseError(f"unexpected line {line!r}")
    if head is None or len(head) != 2 or not all(h.isdigit() for h in head):
        raise ParseError("first line must be 'n m'")
    n, m = int(head[0]), int(head[1])
    for key in "cbA":
        if key not in sections:
            raise ParseError(f"missing section {key}:")
    c = [parse_rational(t) for t in " ".join(sections["c"]).split()]
    b = [parse_rational(t) for t in " ".join(sections["b"]).split()]
    if len(c) != n:
        raise ParseError(f"dimension mismatch: c has {len(c)} entries, n = {n}")
    if len(b) != m:
        raise ParseError(f"dimension mismatch: b has {len(b)} entries, m = {m}")
    rows = []
    for chunk in ";".join(sections["A"]).split(";"):
        toks = chunk.split()
        if toks:
            rows.append([parse_rational(t) for t in toks])
    if len(rows) != m:
        raise ParseError(f"dimension mismatch: A has {len(rows)} rows, m = {m}")
    for i, row in enumerate(rows, 1):
        if len(row) != n:
            raise ParseError(f"dimension mismatch: row {i} of A has {len(row)} entries, n = {n}")
    return LPPrimal(tuple(c), tuple(map(tuple, rows)), tuple(b))


def parse_certificate(text: str, p: LPPrimal) -> CertificatePair:
    """``n`` rationals for x followed by ``m`` for y; ``x:``/``y:`` labels are optional."""
    toks = [t for t in text.replace("x:", " ").replace("y:", " ").split()]
    if len(toks) != p.n + p.m:
        raise ParseError(f"certificate needs {p.n} + {p.m} rationals, got {len(toks)}")
    vals = [parse_rational(t) for t in toks]
    return CertificatePair(tuple(vals[:p.n]), tuple(vals[p.n:]))


def make_dual(p: LPPrimal) -> LPDual:
    return LPDual(p.b, tuple(p.column(j) for j in range(p.n)), p.c)


# ----------------------------------------------------------------------------
# Complementary slackness


@dataclass(frozen=True)
class RowCheck:
    index: int  # 1-based
    y: Fraction
    slack: Fraction  # b_i - A_i x
    product: Fraction

    @property
    def ok(self) -> bool:
        return self.y >= 0 and self.slack >= 0 and self.product == 0


@dataclass(frozen=True)
class ColCheck:
    index: int  # 1-based
    x: Fraction
    reduced: Fraction  # c_j - A_j^T y, must be <= 0 for dual feasibility
    product: Fraction

    @property
    def ok(self) -> bool:
        return self.x >= 0 and self.reduced <= 0 and self.product == 0


@dataclass(frozen=True)
class CSReport:
    rows: tuple[RowCheck, ...]
    cols: tuple[ColCheck, ...]
    primal_objective: Fraction
    dual_objective: Fraction

    @property
    def primal_feasible(self) -> bool:
        return all(r.slack >= 0 for r in self.rows) and all(c.x >= 0 for c in self.cols)

    @property
    def dual_feasible(self) -> bool:
        return all(r.y >= 0 for r in self.rows) and all(c.reduced <= 0 for c in self.cols)

    @property
    def cs_holds(self) -> bool:
        return all(r.product == 0 for r in self.rows) and all(c.product == 0 for c in self.cols)

    @property
    def optimal(self) -> bool:
        return self.primal_feasible and self.dual_feasible and self.cs_holds

    def lines(self) -> list[str]:
        out = []
        for r in self.rows:
            out.append(f"row.{r.index}=" + ("pass" if r.ok else "fail")
                       + f" y={fmt(r.y)} slack={fmt(r.slack)} product={fmt(r.product)}")
        for c in self.cols:
            out.append(f"col.{c.index}=" + ("pass" if c.ok else "fail")
                       + f" x={fmt(c.x)} reduced={fmt(c.reduced)} product={fmt(c.product)}")
        out.append(f"primal_feasible={str(self.primal_feasible).lower()}")
        out.append(f"dual_feasible={str(self.dual_feasible).lower()}")
        out.append(f"complementary_slackness={str(self.cs_holds).lower()}")
        out.append(f"primal_objective={fmt(self.primal_objective)}")
        out.append(f"dual_objective={fmt(self.dual_objective)}")
        return out


def check_cs(p: LPPrimal, cert: CertificatePair) -> CSReport:
    if len(cert.x) != p.n or len(cert.y) != p.m:
        raise InputError(f"certificate dimensions ({len(cert.x)}, {len(cert.y)}) != ({p.n}, {p.m})")
    rows = []
    for i in range(p.m):
        slack = p.b[i] - _dot(p.A[i], cert.x)
        rows.append(RowCheck(i + 1, cert.y[i], slack, cert.y[i] * slack))
    cols = []
    for j in range(p.n):
        reduced = p.c[j] - _dot(p.column(j), cert.y)
        cols.append(ColCheck(j + 1, cert.x[j], reduced, cert.x[j] * reduced))
    return CSReport(tuple(rows), tuple(cols), p.objective(cert.x), _dot(p.b, cert.y))


def verify_optimal_pair(p: LPPrimal, cert: CertificatePair) -> bool:
    report = check_cs(p, cert)
    if not report.optimal:
        return False
    if report.primal_objective != report.dual_objective:
        raise InternalConsistencyError(
            f"optimal pair with unequal objectives {report.primal_objective} != {report.dual_objective}")
    return True


@dataclass(frozen=True)
class HornCertificate:
    cnf: PropCNF
    assignment: dict

    def holds(self) -> bool:
        return self.cnf.evaluate_atoms(self.assignment)

    def falsified(self) -> list[int]:
        truth = {i + 1 for i, a in enumerate(self.cnf.variables) if self.assignment[a]}
        return [ci for ci, c in enumerate(self.cnf.clauses)
                if not any((l > 0) == (abs(l) in truth) for l in c)]


def emit_horn_cs(p: LPPrimal, cert: CertificatePair) -> HornCertificate:
    """Complementary slackness as all-negative two-literal clauses.

    Per row ``!YnotEq0(i) | !B_AnotEq0(i)``, per column
    ``!XnotEq0(j) | !C_AnotEq0(j)``; the assignment says which of those
    atoms are true for ``cert``.
    """
    report = check_cs(p, cert)
    variables, assignment, clauses = [], {}, []
    for r in report.rows:
        ya, sa = GroundAtom("YnotEq0", (str(r.index),)), GroundAtom("B_AnotEq0", (str(r.index),))
        variables += [ya, sa]
        assignment[ya], assignment[sa] = r.y != 0, r.slack != 0
        clauses.append((-(len(variables) - 1), -len(variables)))
    for c in report.cols:
        xa, ca = GroundAtom("XnotEq0", (str(c.index),)), GroundAtom("C_AnotEq0", (str(c.index),))
        variables += [xa, ca]
        assignment[xa], assignment[ca] = c.x != 0, c.reduced != 0
        clauses.append((-(len(variables) - 1), -len(variables)))
    return HornCertificate(PropCNF(tuple(variables), tuple(clauses), (None,) * len(clauses)), assignment)


# ----------------------------------------------------------------------------
# Exact linear algebra and Fourier-Motzkin


def solve_linear(M: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], nvars: int) -> list[Fraction] | None:
    """One solution of ``M v = rhs`` (free variables set to 0), or None if inconsistent."""
    rows = [list(r) + [v] for r, v in zip(M, rhs)]
    pivots = []
    r = 0
    for col in range(nvars):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][col]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    for row in rows[r:]:
        if row[-1] != 0:
            return None
    sol = [Fraction(0)] * nvars
    for i, col in enumerate(pivots):
        sol[col] = rows[i][-1]
    return sol


Inequality = tuple[tuple[Fraction, ...], Fraction]  # coeffs . v <= rhs


def _normalize(coeffs, rhs) -> Inequality:
    scale = max((abs(a) for a in coeffs), default=Fraction(0))
    if scale == 0:
        return tuple(coeffs), rhs
    return tuple(a / scale for a in coeffs), rhs / scale


def fourier_motzkin_feasible(system: Sequence[Inequality], nvars: int) -> bool:
    """Decide ``{v : coeffs . v <= rhs for all rows}`` nonempty by variable elimination."""
    rows = {_normalize(tuple(Fraction(a) for a in co), Fraction(r)) for co, r in system}
    for k in range(nvars):
        pos_, neg_, keep = [], [], set()
        for co, r in rows:
            if co[k] > 0:
                pos_.append((co, r))
            elif co[k] < 0:
                neg_.append((co, r))
            else:
                keep.add((co, r))
        for (pc, pr), (nc, nr) in itertools.product(pos_, neg_):
            a, b = pc[k], -nc[k]
            co = tuple(b * x + a * y for x, y in zip(pc, nc))
            keep.add(_normalize(co, b * pr + a * nr))
        rows = keep
        if any(all(a == 0 for a in co) and r < 0 for co, r in rows):
            return False
    return all(r >= 0 for _, r in rows)


def _unit(n: int, j: int, value) -> tuple[Fraction, ...]:
    return tuple(Fraction(value) if i == j else Fraction(0) for i in range(n))


def primal_system(p: LPPrimal) -> list[Inequality]:
    return [(row, bi) for row, bi in zip(p.A, p.b)] + [(_unit(p.n, j, -1), Fraction(0)) for j in range(p.n)]


def dual_system(p: LPPrimal) -> list[Inequality]:
    cols = [tuple(-a for a in p.column(j)) for j in range(p.n)]
    return [(co, -cj) for co, cj in zip(cols, p.c)] + [(_unit(p.m, i, -1), Fraction(0)) for i in range(p.m)]


def primal_feasible(p: LPPrimal) -> bool:
    return fourier_motzkin_feasible(primal_system(p), p.n)


def dual_feasible(p: LPPrimal) -> bool:
    return fourier_motzkin_feasible(dual_system(p), p.m)


def objective_at_least(p: LPPrimal, k) -> bool:
    """Is there a feasible x with ``c.x >= k``?  (The decision question binary search asks.)"""
    system = primal_system(p) + [(tuple(-v for v in p.c), -Fraction(k))]
    return fourier_motzkin_feasible(system, p.n)


# ----------------------------------------------------------------------------
# Single-call optimal pair


def complementarity_patterns(m: int, n: int):
    """Row bit 1 = primal row tight (else y_i = 0); column bit 1 = dual row tight (else x_j = 0)."""
    return itertools.product((0, 1), repeat=m + n)


def pattern_pair(p: LPPrimal, pattern) -> CertificatePair | None:
    """Solve the equations a pattern imposes; None if they are inconsistent."""
    rows, cols = pattern[:p.m], pattern[p.m:]
    xm, xr = [], []
    for i in range(p.m):
        if rows[i]:
            xm.append(p.A[i])
            xr.append(p.b[i])
    for j in range(p.n):
        if not cols[j]:
            xm.append(_unit(p.n, j, 1))
            xr.append(Fraction(0))
    x = solve_linear(xm, xr, p.n)
    if x is None:
        return None
    ym, yr = [], []
    for i in range(p.m):
        if not rows[i]:
            ym.append(_unit(p.m, i, 1))
            yr.append(Fraction(0))
    for j in range(p.n):
        if cols[j]:
            ym.append(p.column(j))
            yr.append(p.c[j])
    y = solve_linear(ym, yr, p.m)
    if y is None:
        return None
    return CertificatePair(tuple(x), tuple(y))


@dataclass
class JointFeasibility:
    """Decides primal feasibility, dual feasibility and complementary slackness jointly.

    ``calls`` counts invocations; each one is a single yes/no question whose
    yes-answer comes with the witnessing pair.
    """

    calls: int = 0

    def __call__(self, p: LPPrimal) -> CertificatePair | None:
        self.calls += 1
        if p.m + p.n > MAX_PATTERN_SIZE:
            raise LimitExceeded(
                f"size bound exceeded: m + n = {p.m + p.n} > {MAX_PATTERN_SIZE}", p.m + p.n, MAX_PATTERN_SIZE)
        for pattern in complementarity_patterns(p.m, p.n):
            cert = pattern_pair(p, pattern)
            if cert is not None and check_cs(p, cert).optimal:
                return cert
        return None


@dataclass(frozen=True)
class Found:
    cert: CertificatePair
    objective: Fraction
    decision_calls: int


@dataclass(frozen=True)
class NoOptimalPair:
    reason: str  # "primal-infeasible" | "primal-unbounded"
    dual_feasible: bool
    decision_calls: int


def decide_optimal_pair(p: LPPrimal, oracle: JointFeasibility | None = None) -> Found | NoOptimalPair:
    """One joint-feasibility question settles optimality.

    On a no-answer the failure is classified by separate Fourier-Motzkin
    feasibility checks, which are not decision calls of the joint kind.
    """
    if p.m + p.n > MAX_PATTERN_SIZE:
        raise LimitExceeded(
            f"size bound exceeded: m + n = {p.m + p.n} > {MAX_PATTERN_SIZE}", p.m + p.n, MAX_PATTERN_SIZE)
    oracle = oracle if oracle is not None else JointFeasibility()
    before = oracle.calls
    cert = oracle(p)
    calls = oracle.calls - before
    if cert is not None:
        if not verify_optimal_pair(p, cert):
            raise InternalConsistencyError("joint-feasibility witness failed verification")
        return Found(cert, p.objective(cert.x), calls)
    dual_ok = dual_feasible(p)
    if not primal_feasible(p):
        return NoOptimalPair("primal-infeasible", dual_ok, calls)
    if dual_ok:
        raise InternalConsistencyError("primal and dual feasible but no complementary pair found")
    return NoOptimalPair("primal-unbounded", dual_ok, calls)
