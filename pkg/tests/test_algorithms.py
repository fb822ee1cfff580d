import math

import pytest
from hypothesis import given, settings, strategies as st

from wkserver.algorithms import (
    CheapestMove,
    StickyHeavy,
    WeightedRank,
    make_algorithm,
    parse_algorithm,
    run_online,
)
from wkserver.core import Configuration, CostLedger, DomainError, UniformSpace, WeightVector, serve_with


def _setup(n=3, k=2, beta=4, start=None):
    space = UniformSpace(n)
    init = Configuration(space, start or (0,) * k)
    return space, WeightVector(k, beta), init


def test_init():
    space, w, init = _setup()
    alg = CheapestMove(space, w, init)
    assert alg.config == init
    with pytest.raises(DomainError):
        WeightedRank(space, w, init)
    with pytest.raises(DomainError):
        CheapestMove(space, WeightVector(3, 4), init)
    with pytest.raises(DomainError):
        CheapestMove(space, WeightVector(0, 4), init)
    with pytest.raises(DomainError):
        StickyHeavy(space, w, init, period=0)


def test_serve_step_covered_and_uncovered():
    space, w, init = _setup()
    alg = CheapestMove(space, w, init)
    assert alg.serve_step(0) == (None, 0)
    assert alg.serve_step(2) == (0, 1)
    assert alg.config.positions == (2, 0)


def test_weighted_rank_frequencies():
    space, w, init = _setup(n=2, k=2, beta=4, start=(0, 0))
    alg = WeightedRank(space, w, init, seed=2024)
    n = 100_000
    hits = 0
    for _ in range(n):
        alg.config = init
        i, _ = alg.serve_step(1)
        hits += i == 0
    p = 4 / 5
    hw = 2.5758 * math.sqrt(p * (1 - p) / n)
    assert abs(hits / n - p) <= hw


def test_sticky_heavy_period():
    space, w, init = _setup(n=4, k=2, beta=4)
    alg = StickyHeavy(space, w, init, period=3)
    chosen = [alg.serve_step(r)[0] for r in (1, 2, 3, 1, 2, 3)]
    # faults 1,2 move the light server, fault 3 the heavy one
    assert chosen[:3] == [0, 0, 1]


def test_run_online_empty():
    space, w, init = _setup()
    assert run_online(CheapestMove(space, w, init), []).total == 0


def test_run_online_k1_alternating():
    space, w, init = _setup(n=2, k=1)
    reqs = [0, 1, 1, 0, 1, 0, 0]
    changes = sum(1 for a, b in zip([0] + reqs, reqs) if a != b)
    assert run_online(CheapestMove(space, w, init), reqs).total == changes


def _cheapest_oracle(start, requests, beta):
    pos = list(start)
    cost = 0
    for r in requests:
        if r not in pos:
            pos[0] = r
            cost += 1
    return cost


def test_run_online_cheapest_hand_trace():
    space, w, init = _setup(n=3, k=2, beta=4, start=(0, 1))
    reqs = [2, 0, 2, 0, 2]
    cost = run_online(CheapestMove(space, w, init), reqs).total
    assert cost == _cheapest_oracle((0, 1), reqs, 4) == 5


def test_parse_algorithm():
    assert parse_algorithm("cheapest") == (CheapestMove, {})
    assert parse_algorithm("weighted:0.5") == (WeightedRank, {"exponent": 0.5})
    assert parse_algorithm("sticky:7") == (StickyHeavy, {"period": 7})
    for bad in ("nope", "sticky:x", "cheapest:3"):
        with pytest.raises(DomainError):
            parse_algorithm(bad)
    space, w, init = _setup()
    assert make_algorithm("weighted:2", space, w, init, seed=1).identity == "weighted:2"


SPECS = ["cheapest", "weighted", "weighted:0.5", "sticky:2", "sticky:5"]
reqs = st.lists(st.integers(0, 3), max_size=60)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPECS), reqs, st.integers(1, 3), st.integers(2, 5), st.integers(0, 10**6))
def test_coverage_and_ledger(spec, requests, k, beta, seed):
    space = UniformSpace(4)
    w = WeightVector(k, beta)
    init = Configuration.at(space, k)
    alg = make_algorithm(spec, space, w, init, seed=seed)
    servers = []
    cfg = init
    total = 0
    for r in requests:
        i, c = alg.serve_step(r)
        assert alg.config.covers(r)
        if i is not None:
            servers.append(i)
            cfg, paid = serve_with(cfg, i, r, w)
            assert paid == c
            total += c
        assert cfg == alg.config
    assert CostLedger.from_servers(w, servers).total == total

    again = make_algorithm(spec, space, w, init, seed=seed)
    assert run_online(again, requests).total == total


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["cheapest", "sticky:3"]), reqs)
def test_deterministic_replay(spec, requests):
    space = UniformSpace(4)
    w = WeightVector(3, 3)
    init = Configuration.at(space, 3)
    a = run_online(make_algorithm(spec, space, w, init), requests)
    b = run_online(make_algorithm(spec, space, w, init, seed=99), requests)
    assert a == b
