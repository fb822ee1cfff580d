"""Oblivious adversary: random input generation and its offline serving plan.

``generate_trace`` runs the coupon-collector outer loop over a space of
``n_{k-1} + 1`` points and, for every sample that leaves some point
unmarked, expands a recursive strategy tree on the other points.
``adversary_serve`` replays the tree with full lookahead and keeps, at every
node of level l, some server heavier than the l lightest inside the node's
point set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import seeding
from .core import (
    Configuration,
    ConsistencyError,
    CostLedger,
    DomainError,
    PointId,
    RangeLimitError,
    UniformSpace,
    WeightVector,
    serve_with,
)
from .setsys import INT64_MAX, cached_set_system, harmonic, n_seq, property3_witness

DEFAULT_MAX_REQUESTS = 10**8


@dataclass(frozen=True, slots=True)
class StrategyNode:
    level: int
    pointset: tuple[PointId, ...]
    chosen_sets: tuple[int, ...] = ()
    children: tuple[StrategyNode, ...] = ()
    leaf_request: PointId | None = None


@dataclass(frozen=True)
class Trace:
    k: int
    beta: int
    space: UniformSpace
    mark_order: tuple[PointId, ...]
    calls: tuple[StrategyNode, ...]
    requests: tuple[PointId, ...]
    seed: int

    @property
    def weights(self) -> WeightVector:
        return WeightVector(self.k, self.beta)


class Move(NamedTuple):
    step: int  # index of the first request served after the move
    server: int
    source: PointId
    target: PointId


# -- cost sequence and parameter choice ---------------------------------------

def c_seq(beta: int, level: int, limit: int = INT64_MAX) -> int:
    """Adversary cost bound for one strategy call at ``level``."""
    if not isinstance(beta, int) or beta < 2:
        raise DomainError(f"beta must be an integer >= 2, got {beta!r}")
    if not isinstance(level, int) or level < 0:
        raise DomainError(f"level must be >= 0, got {level!r}")
    c = 0
    for l in range(1, level + 1):
        c = beta ** (l - 1) + beta * (-(-n_seq(l - 1) // 2) + 1) * c
        if c > limit:
            raise RangeLimitError(f"c_{l} exceeds the integer limit {limit}")
    return c


def _branching_sum(k: int) -> int:
    # sum_{i=1}^{k-1} prod_{j=i}^{k-2} (ceil(n_j/2) + 1)
    factors = [-(-n_seq(j) // 2) + 1 for j in range(1, k - 1)]
    return sum(math.prod(factors[i - 1:]) for i in range(1, k))


def c_closed_form(beta: int, k: int) -> int:
    """Unrolled form of ``c_seq(beta, k - 1)``."""
    if not isinstance(k, int) or k < 2:
        raise DomainError("closed form needs k >= 2; use c_seq for k = 1")
    if not isinstance(beta, int) or beta < 2:
        raise DomainError(f"beta must be an integer >= 2, got {beta!r}")
    return beta ** (k - 2) * _branching_sum(k)


def expected_calls(k: int) -> Fraction:
    """Mean number of strategy calls made by one adversary run: (n+1) H(n+1) - 1."""
    n = n_seq(k - 1)
    return (n + 1) * harmonic(n + 1) - 1


def choose_beta(k: int, epsilon) -> int:
    """Integer weight base that keeps the adversary's expected cost within beta^(k-1) * (1 + eps)."""
    if not isinstance(k, int) or k < 2:
        raise DomainError(f"choose_beta needs k >= 2, got {k!r}")
    eps = _as_fraction(epsilon)
    if eps <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    value = math.ceil(1 / eps) * expected_calls(k) * _branching_sum(k)
    return max(2, math.ceil(value))


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def requests_per_call(k: int, beta: int) -> int:
    return math.prod(beta * (-(-n_seq(j - 1) // 2) + 1) for j in range(1, k))


def expected_requests(k: int, beta: int) -> Fraction:
    return expected_calls(k) * requests_per_call(k, beta)


def preflight(k: int, beta: int, max_requests: int = DEFAULT_MAX_REQUESTS) -> Fraction:
    WeightVector(k, beta)
    est = expected_requests(k, beta)
    if est > max_requests:
        raise RangeLimitError(
            f"expected trace length {float(est):.3g} requests exceeds the cap of {max_requests}"
        )
    return est


# -- generation ----------------------------------------------------------------

def generate_strategy(
    level: int, pointset: Sequence[PointId], beta: int, seed: int, path: tuple[int, ...] = ()
) -> StrategyNode:
    """Expand one strategy call; the node at ``path`` draws from its own stream."""
    pointset = tuple(pointset)
    if level == 0:
        if len(pointset) != 1:
            raise DomainError(f"a level-0 call needs exactly one point, got {len(pointset)}")
        return StrategyNode(0, pointset, leaf_request=pointset[0])
    sys = cached_set_system(pointset, level)
    reps = beta * len(sys.families)
    rng = seeding.stream(seed, seeding.NODES, *path)
    chosen = tuple(int(c) for c in rng.integers(len(sys.families), size=reps))
    if level == 1:
        children = tuple(
            StrategyNode(0, sys.families[c], leaf_request=sys.families[c][0]) for c in chosen
        )
    else:
        children = tuple(
            generate_strategy(level - 1, sys.families[c], beta, seed, path + (j,))
            for j, c in enumerate(chosen)
        )
    return StrategyNode(level, pointset, chosen, children)


def sample_mark_order(size: int, rng) -> tuple[PointId, ...]:
    """Uniform samples from ``range(size)`` up to and including the one that marks the last point."""
    order = []
    unmarked = set(range(size))
    batch = max(16, 2 * size)
    while unmarked:
        for p in rng.integers(size, size=batch):
            p = int(p)
            order.append(p)
            unmarked.discard(p)
            if not unmarked:
                break
    return tuple(order)


def generate_trace(k: int, beta: int, seed: int, max_requests: int = DEFAULT_MAX_REQUESTS) -> Trace:
    preflight(k, beta, max_requests)
    size = n_seq(k - 1) + 1
    space = UniformSpace(size)
    marks = sample_mark_order(size, seeding.stream(seed, seeding.MARKS))
    calls = []
    for i, p in enumerate(marks[:-1]):
        rest = tuple(x for x in range(size) if x != p)
        calls.append(generate_strategy(k - 1, rest, beta, seed, (i,)))
    calls = tuple(calls)
    return Trace(k, beta, space, marks, calls, leaf_requests(calls), seed)


def leaf_requests(nodes) -> tuple[PointId, ...]:
    out = []
    stack = list(reversed(nodes))
    while stack:
        node = stack.pop()
        if node.level == 0:
            out.append(node.leaf_request)
        else:
            stack.extend(reversed(node.children))
    return tuple(out)


def flatten_requests(trace: Trace) -> tuple[PointId, ...]:
    return leaf_requests(trace.calls)


def validate_trace(trace: Trace) -> None:
    """Raise ``ConsistencyError`` unless the trace satisfies every structural invariant."""
    size = n_seq(trace.k - 1) + 1
    if trace.space.size != size:
        raise ConsistencyError(f"space has {trace.space.size} points, expected {size}")
    if not trace.mark_order:
        raise ConsistencyError("empty mark order")
    seen = set()
    for j, p in enumerate(trace.mark_order):
        if p not in trace.space:
            raise ConsistencyError(f"mark order entry {p} is outside the space")
        seen.add(p)
        done = len(seen) == size
        if done != (j == len(trace.mark_order) - 1):
            raise ConsistencyError("mark order must end exactly when every point is marked")
    if len(trace.calls) != len(trace.mark_order) - 1:
        raise ConsistencyError("expected one strategy call per non-final mark")
    for p, node in zip(trace.mark_order, trace.calls):
        want = tuple(x for x in range(size) if x != p)
        if node.level != trace.k - 1 or node.pointset != want:
            raise ConsistencyError(f"call after marking {p} has the wrong level or point set")
        _validate_node(node, trace.beta)
    if trace.requests != flatten_requests(trace):
        raise ConsistencyError("flat request sequence does not match the recursion tree")


def _validate_node(node: StrategyNode, beta: int) -> None:
    if node.level == 0:
        if len(node.pointset) != 1 or node.leaf_request != node.pointset[0]:
            raise ConsistencyError("leaf must request its unique point")
        return
    sys = cached_set_system(node.pointset, node.level)
    if len(node.children) != beta * len(sys.families) or len(node.chosen_sets) != len(node.children):
        raise ConsistencyError(f"level-{node.level} node has the wrong arity")
    for c, child in zip(node.chosen_sets, node.children):
        if not 0 <= c < len(sys.families) or child.pointset != sys.families[c]:
            raise ConsistencyError("child point set is not the chosen family")
        if child.level != node.level - 1:
            raise ConsistencyError("child level must be one less than its parent")
        _validate_node(child, beta)


# -- offline serving -----------------------------------------------------------

def cost_bound(trace: Trace) -> int:
    """Per-trace ceiling on ``adversary_serve``: beta^(k-1) + calls * c_{k-1}."""
    return trace.beta ** (trace.k - 1) + len(trace.calls) * c_seq(trace.beta, trace.k - 1)


def adversary_serve(
    trace: Trace, initial: Configuration | None = None
) -> tuple[list[Move], CostLedger]:
    k, beta = trace.k, trace.beta
    weights = trace.weights
    if initial is None:
        initial = Configuration.at(trace.space, k)
    if initial.k != k or initial.space != trace.space:
        raise DomainError("initial configuration does not match the trace")

    pos = list(initial.positions)
    moves: list[Move] = []
    step = 0

    def move(i, target):
        if pos[i] != target:
            moves.append(Move(step, i, pos[i], target))
            pos[i] = target

    def serve(node):
        nonlocal step
        if node.level == 0:
            if node.leaf_request not in pos:
                raise ConsistencyError(f"request {step} at {node.leaf_request} is uncovered")
            step += 1
            return
        members = node.pointset
        holder = next((i for i in range(node.level, k) if pos[i] in members), None)
        if holder is None:
            raise ConsistencyError(
                f"no server of rank >= {node.level} inside a level-{node.level} call at step {step}"
            )
        sys = cached_set_system(members, node.level)
        move(node.level - 1, property3_witness(sys, pos[holder]))
        for child in node.children:
            serve(child)

    # the last point marked lies in every call's point set
    move(k - 1, trace.mark_order[-1])
    for call in trace.calls:
        serve(call)

    ledger = replay_schedule(trace.requests, initial, moves, weights)
    bound = cost_bound(trace)
    if ledger.total > bound:
        raise ConsistencyError(f"adversary cost {ledger.total} exceeds the per-trace bound {bound}")
    return moves, ledger


def replay_schedule(
    requests: Sequence[PointId], initial: Configuration, moves: Sequence[Move], weights: WeightVector
) -> CostLedger:
    """Apply ``moves`` through core accounting and check that every request is covered."""
    config = initial
    servers = []
    it = iter(moves)
    pending = next(it, None)
    for t, r in enumerate(requests):
        while pending is not None and pending.step == t:
            config, cost = serve_with(config, pending.server, pending.target, weights)
            if cost:
                servers.append(pending.server)
            pending = next(it, None)
        if not config.covers(r):
            raise ConsistencyError(f"request {t} at point {r} is uncovered")
    while pending is not None:
        config, cost = serve_with(config, pending.server, pending.target, weights)
        if cost:
            servers.append(pending.server)
        pending = next(it, None)
    return CostLedger.from_servers(weights, servers)
