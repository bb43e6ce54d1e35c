"""Capacitated s-t networks: shortest augmenting paths, cuts and optimality certificates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InputError, LimitExceeded, ParseError
from .lp import fmt, parse_rational

MAX_CUT_VERTICES = 20

Edge = tuple[str, str]


@dataclass(frozen=True)
class FlowNetwork:
    vertices: tuple[str, ...]
    capacity: Mapping[Edge, Fraction]
    source: str
    sink: str

    def __post_init__(self):
        if self.source == self.sink:
            raise InputError("source and sink must differ")
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise InputError("duplicate vertex")
        for v in (self.source, self.sink):
            if v not in vs:
                raise InputError(f"vertex {v!r} not declared")
        for (u, v), cap in self.capacity.items():
            if u == v:
                raise InputError(f"self-loop at {u!r}")
            if u not in vs or v not in vs:
                raise InputError(f"edge ({u},{v}) uses an undeclared vertex")
            if cap <= 0:
                raise InputError(f"capacity of ({u},{v}) must be positive, got {fmt(Fraction(cap))}")

    @property
    def edges(self) -> list[Edge]:
        return list(self.capacity)

    def to_text(self) -> str:
        lines = [f"node {v}" for v in self.vertices]
        lines += [f"source {self.source}", f"sink {self.sink}"]
        lines += [f"edge {u} {v} {fmt(c)}" for (u, v), c in self.capacity.items()]
        return "\n".join(lines) + "\n"


Flow = dict  # Edge -> Fraction


def parse_network(text: str) -> FlowNetwork:
    """``node <name>``, ``source <name>``, ``sink <name>``, ``edge <u> <v> <cap>``.

    Vertices named only in edges are added in order of first appearance.
    """
    vertices: dict[str, None] = {}
    capacity: dict[Edge, Fraction] = {}
    source = sink = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if kw == "node" and len(parts) == 2:
            vertices.setdefault(parts[1])
        elif kw in ("source", "sink") and len(parts) == 2:
            vertices.setdefault(parts[1])
            if (source if kw == "source" else sink) is not None:
                raise ParseError(f"line {lineno}: {kw} given twice")
            if kw == "source":
                source = parts[1]
            else:
                sink = parts[1]
        elif kw == "edge" and len(parts) == 4:
            u, v = parts[1], parts[2]
            cap = parse_rational(parts[3])
            if cap <= 0:
                raise ParseError(f"line {lineno}: capacity must be positive, got {parts[3]}")
            if u == v:
                raise ParseError(f"line {lineno}: self-loop at {u}")
            if (u, v) in capacity:
                raise ParseError(f"line {lineno}: duplicate edge {u} -> {v}")
            vertices.setdefault(u)
            vertices.setdefault(v)
            capacity[(u, v)] = cap
        else:
            raise ParseError(f"line {lineno}: cannot parse {line!r}")
    if source is None or sink is None:
        raise ParseError("network needs both a source and a sink")
    if source == sink:
        raise ParseError("source and sink must differ")
    return FlowNetwork(tuple(vertices), capacity, source, sink)


def parse_flow(text: str, net: FlowNetwork) -> Flow:
    """Lines ``<u> <v> <amount>``; edges not listed carry zero."""
    flow = {e: Fraction(0) for e in net.capacity}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected '<u> <v> <amount>'")
        e = (parts[0], parts[1])
        if e not in flow:
            raise ParseError(f"line {lineno}: no edge {e[0]} -> {e[1]}")
        flow[e] = parse_rational(parts[2])
    return flow


def parse_cut(text: str, net: FlowNetwork) -> frozenset[str]:
    names = text.split()
    unknown = [v for v in names if v not in net.vertices]
    if unknown:
        raise ParseError(f"cut names unknown vertex {unknown[0]!r}")
    return frozenset(names)


def flow_value(net: FlowNetwork, flow: Flow) -> Fraction:
    s = net.source
    out = sum((f for (u, _), f in flow.items() if u == s), Fraction(0))
    into = sum((f for (_, v), f in flow.items() if v == s), Fraction(0))
    return out - into


def _residual(net: FlowNetwork, flow: Flow, u: str, v: str) -> Fraction:
    return net.capacity.get((u, v), 0) - flow.get((u, v), 0) + flow.get((v, u), 0)


def _neighbours(net: FlowNetwork) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {v: [] for v in net.vertices}
    for u, v in net.capacity:
        if v not in adj[u]:
            adj[u].append(v)
        if u not in adj[v]:
            adj[v].append(u)
    return adj


def _reachable(net: FlowNetwork, flow: Flow, adj) -> dict[str, str | None]:
    parent: dict[str, str | None] = {net.source: None}
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in parent and _residual(net, flow, u, v) > 0:
                parent[v] = u
                queue.append(v)
    return parent


def max_flow(net: FlowNetwork) -> tuple[Flow, Fraction]:
    """Edmonds-Karp: augment along breadth-first shortest residual paths."""
    flow = {e: Fraction(0) for e in net.capacity}
    adj = _neighbours(net)
    while True:
        parent = _reachable(net, flow, adj)
        if net.sink not in parent:
            break
        path = []
        v = net.sink
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        delta = min(_residual(net, flow, u, v) for u, v in path)
        for u, v in path:
            # cancel opposing flow first, then push forward
            back = min(flow.get((v, u), Fraction(0)), delta)
            if back:
                flow[(v, u)] -= back
            if delta - back:
                flow[(u, v)] += delta - back
    return flow, flow_value(net, flow)


def min_cut_from_flow(net: FlowNetwork, flow: Flow) -> frozenset[str]:
    """Vertices reachable from the source in the residual network."""
    parent = _reachable(net, flow, _neighbours(net))
    if net.sink in parent:
        raise InputError("flow is not maximal: the residual network has an s-t path")
    return frozenset(parent)


def _check_cut(net: FlowNetwork, cut) -> None:
    if net.source not in cut:
        raise InputError("invalid cut: source not in U")
    if net.sink in cut:
        raise InputError("invalid cut: sink in U")


def cut_capacity(net: FlowNetwork, cut) -> Fraction:
    _check_cut(net, cut)
    return sum((c for (u, v), c in net.capacity.items() if u in cut and v not in cut), Fraction(0))


CONDITIONS = ("cut", "capacity", "conservation", "forward_saturated", "backward_zero", "value")


@dataclass(frozen=True)
class CertificateReport:
    results: tuple[tuple[str, bool, str], ...]  # (condition, passed, detail)
    flow_value: Fraction
    cut_capacity: Fraction | None

    @property
    def verdict(self) -> bool:
        return all(ok for _, ok, _ in self.results)

    @property
    def failed(self) -> list[str]:
        return [name for name, ok, _ in self.results if not ok]

    def passed(self, name: str) -> bool:
        return next(ok for n, ok, _ in self.results if n == name)

    def lines(self) -> list[str]:
        out = []
        for name, ok, detail in self.results:
            out.append(f"{name}={'pass' if ok else 'fail'}" + (f" {detail}" if detail else ""))
        out.append(f"flow_value={fmt(self.flow_value)}")
        cap = "undefined" if self.cut_capacity is None else fmt(self.cut_capacity)
        out.append(f"cut_capacity={cap}")
        return out


def verify_certificate(net: FlowNetwork, flow: Flow, cut) -> CertificateReport:
    """Check a (flow, cut) pair against the max-flow/min-cut optimality conditions."""
    cut = frozenset(cut)
    results = []
    cut_ok = net.source in cut and net.sink not in cut
    results.append(("cut", cut_ok, "" if cut_ok else "need source in U and sink outside U"))

    bad = [e for e in net.capacity if not 0 <= flow.get(e, 0) <= net.capacity[e]]
    results.append(("capacity", not bad, _edges_detail(bad)))

    unbalanced = []
    for v in net.vertices:
        if v in (net.source, net.sink):
            continue
        into = sum((f for (a, b), f in flow.items() if b == v), Fraction(0))
        out = sum((f for (a, b), f in flow.items() if a == v), Fraction(0))
        if into != out:
            unbalanced.append(v)
    results.append(("conservation", not unbalanced, " ".join(f"at={v}" for v in unbalanced)))

    unsat = [e for e in net.capacity if e[0] in cut and e[1] not in cut and flow.get(e, 0) != net.capacity[e]]
    results.append(("forward_saturated", not unsat, _edges_detail(unsat)))

    back = [e for e in net.capacity if e[0] not in cut and e[1] in cut and flow.get(e, 0) != 0]
    results.append(("backward_zero", not back, _edges_detail(back)))

    value = flow_value(net, flow)
    cap = cut_capacity(net, cut) if cut_ok else None
    same = cap is not None and value == cap
    detail = f"{fmt(value)} != {'undefined' if cap is None else fmt(cap)}" if not same else ""
    results.append(("value", same, detail))
    return CertificateReport(tuple(results), value, cap)


def _edges_detail(edges) -> str:
    return " ".join(f"edge={u}->{v}" for u, v in edges)


def exists_certifying_cut(net: FlowNetwork, flow: Flow) -> frozenset[str] | None:
    """Search all cuts in subset order (bitmask over internal vertices in declaration order)."""
    if len(net.vertices) > MAX_CUT_VERTICES:
        raise LimitExceeded(
            f"size bound exceeded: {len(net.vertices)} vertices > {MAX_CUT_VERTICES}",
            len(net.vertices), MAX_CUT_VERTICES)
    inner = [v for v in net.vertices if v not in (net.source, net.sink)]
    for mask in range(1 << len(inner)):
        cut = frozenset([net.source, *(v for i, v in enumerate(inner) if mask >> i & 1)])
        if verify_certificate(net, flow, cut).verdict:
            return cut
    return None


def all_cuts(net: FlowNetwork):
    inner = [v for v in net.vertices if v not in (net.source, net.sink)]
    for mask in range(1 << len(inner)):
        yield frozenset([net.source, *(v for i, v in enumerate(inner) if mask >> i & 1)])


def format_flow(net: FlowNetwork, flow: Flow) -> list[str]:
    return [f"flow {u} {v} {fmt(flow.get((u, v), Fraction(0)))}" for u, v in net.capacity]


def sorted_cut(net: FlowNetwork, cut) -> list[str]:
    return [v for v in net.vertices if v in cut]
