import itertools
import random
from fractions import Fraction

import pytest

from generators import random_network
from synopt.errors import InputError, LimitExceeded, ParseError
from synopt.flow import (
    FlowNetwork,
    cut_capacity,
    exists_certifying_cut,
    flow_value,
    max_flow,
    min_cut_from_flow,
    parse_cut,
    parse_flow,
    parse_network,
    verify_certificate,
)

DIAMOND = "source s\nsink t\nnode a\nnode b\nedge s a 3\nedge s b 2\nedge a t 2\nedge b t 3\n"
SINGLE = "source s\nsink t\nedge s t 5\n"


def diamond():
    return parse_network(DIAMOND)


def test_parse_network():
    net = parse_network(SINGLE)
    assert net.edges == [("s", "t")] and net.capacity[("s", "t")] == 5
    assert parse_network(net.to_text()) == net


@pytest.mark.parametrize("text", [
    "source s\nsink t\nedge s t 0\n",
    "source s\nsink t\nedge s t 1\nedge s t 2\n",
    "source s\nsink s\n",
    "source s\nsink t\nedge a a 1\n",
    "source s\nedge s t 1\n",
])
def test_parse_network_errors(text):
    with pytest.raises(ParseError):
        parse_network(text)


def test_max_flow_examples():
    assert max_flow(parse_network(SINGLE))[1] == 5
    assert max_flow(diamond())[1] == 4
    assert max_flow(parse_network("source s\nsink t\nnode a\nedge s a 2\n"))[1] == 0


def test_min_cut_examples():
    net = parse_network(SINGLE)
    assert min_cut_from_flow(net, max_flow(net)[0]) == {"s"}
    net = diamond()
    flow, _ = max_flow(net)
    cut = min_cut_from_flow(net, flow)
    assert cut == {"s", "a"} and cut_capacity(net, cut) == 4
    with pytest.raises(InputError, match="not maximal"):
        min_cut_from_flow(net, {e: Fraction(0) for e in net.capacity})


def test_cut_capacity_examples():
    net = diamond()
    assert cut_capacity(net, {"s"}) == 5
    assert cut_capacity(net, {"s", "a"}) == 4
    assert cut_capacity(net, {"s", "a", "b"}) == 5
    with pytest.raises(InputError):
        cut_capacity(net, {"a"})
    with pytest.raises(InputError):
        cut_capacity(net, {"s", "t"})


def test_certificate_examples():
    net = diamond()
    flow, _ = max_flow(net)
    assert verify_certificate(net, flow, {"s", "a"}).verdict
    report = verify_certificate(net, flow, {"s"})
    assert report.failed == ["forward_saturated", "value"]
    single = parse_network(SINGLE)
    zero = {("s", "t"): Fraction(0)}
    assert verify_certificate(single, zero, {"s"}).failed == ["forward_saturated", "value"]


def test_certifying_cut_search():
    net = diamond()
    flow, _ = max_flow(net)
    assert exists_certifying_cut(net, flow) == {"s", "a"}
    three = parse_flow("s a 2\na t 2\ns b 1\nb t 1\n", net)
    assert flow_value(net, three) == 3
    assert exists_certifying_cut(net, three) is None
    single = parse_network(SINGLE)
    assert exists_certifying_cut(single, {("s", "t"): Fraction(5)}) == {"s"}
    big = FlowNetwork(tuple(f"v{i}" for i in range(21)), {}, "v0", "v1")
    with pytest.raises(LimitExceeded):
        exists_certifying_cut(big, {})


def test_parse_flow_and_cut():
    net = diamond()
    with pytest.raises(ParseError):
        parse_flow("s t 1\n", net)
    with pytest.raises(ParseError):
        parse_cut("s q", net)
    assert parse_cut("s a", net) == {"s", "a"}


def min_cut_brute(net):
    inner = [v for v in net.vertices if v not in (net.source, net.sink)]
    best = None
    for k in range(len(inner) + 1):
        for extra in itertools.combinations(inner, k):
            U = {net.source, *extra}
            cap = sum((c for (u, v), c in net.capacity.items() if u in U and v not in U), Fraction(0))
            best = cap if best is None else min(best, cap)
    return best


def test_max_flow_equals_min_cut_random():
    rng = random.Random(31)
    for _ in range(200):
        net = random_network(rng, rng.randint(2, 8))
        flow, value = max_flow(net)
        assert value == min_cut_brute(net)
        cut = min_cut_from_flow(net, flow)
        assert verify_certificate(net, flow, cut).verdict


def test_downward_perturbations_rejected():
    rng = random.Random(32)
    for _ in range(60):
        net = random_network(rng, rng.randint(2, 7))
        flow, _ = max_flow(net)
        cut = min_cut_from_flow(net, flow)
        for e, f in flow.items():
            if f == 0:
                continue
            for delta in (f, f / 2):
                bent = dict(flow)
                bent[e] = f - delta
                assert not verify_certificate(net, bent, cut).verdict
