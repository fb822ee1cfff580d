"""Exact offline optimum for weighted k-server on a uniform metric.

``opt_cost_dp`` only considers lazy schedules: a server moves only to serve
an uncovered request, and goes straight to it. On a uniform metric every
schedule can be made lazy without raising its cost. ``opt_cost_bruteforce``
does not assume this and is used to check it.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import Configuration, DomainError, PointId, RangeLimitError, UniformSpace, WeightVector

DEFAULT_MAX_STATES = 2_000_000


def _check(space: UniformSpace, weights: WeightVector, requests, initial: Configuration):
    if initial.space != space or initial.k != weights.k:
        raise DomainError("initial configuration does not match the space and weights")
    for r in requests:
        space.check_point(r)


def opt_cost_dp(
    space: UniformSpace,
    weights: WeightVector,
    requests: Sequence[PointId],
    initial: Configuration,
    max_states: int = DEFAULT_MAX_STATES,
) -> int:
    """Minimum total cost of serving ``requests`` from ``initial``.

    The table has one cell per ordered configuration (n**k cells); after each
    request only cells covering it stay finite.
    """
    _check(space, weights, requests, initial)
    n, k = space.size, weights.k
    if n**k > max_states:
        raise RangeLimitError(f"{n}**{k} configurations exceed the state cap of {max_states}")
    cost = np.full((n,) * k, np.inf)
    cost[initial.positions] = 0.0
    w = [float(x) for x in weights.as_tuple()]
    prev = None
    for r in requests:
        if r == prev:
            continue
        new = np.full_like(cost, np.inf)
        for i in range(k):
            idx = (slice(None),) * i + (r,)
            # already covered by server i, or server i arrives from anywhere
            new[idx] = np.minimum(new[idx], np.minimum(cost[idx], cost.min(axis=i) + w[i]))
        cost = new
        prev = r
    return int(cost.min())


def opt_cost_bruteforce(
    space: UniformSpace,
    weights: WeightVector,
    requests: Sequence[PointId],
    initial: Configuration,
    extra_moves: int = 1,
    max_steps: int = 10,
    max_servers: int = 3,
    max_points: int = 5,
) -> int:
    """Exhaustive search over all schedules with at most ``extra_moves + 1`` moves per request.

    Moves may go anywhere, including to points nobody requests, and may
    happen while the request is already covered.
    """
    _check(space, weights, requests, initial)
    n, k, T = space.size, weights.k, len(requests)
    if T > max_steps or k > max_servers or n > max_points:
        raise RangeLimitError(
            f"brute force limited to T<={max_steps}, k<={max_servers}, n<={max_points}; "
            f"got T={T}, k={k}, n={n}"
        )
    w = weights.as_tuple()
    budget = extra_moves + 1
    requests = tuple(requests)

    def successors(config):
        # every configuration reachable with at most `budget` single-server moves
        for changed in range(budget + 1):
            for servers in itertools.combinations(range(k), changed):
                for targets in itertools.product(range(n), repeat=changed):
                    if any(config[i] == p for i, p in zip(servers, targets)):
                        continue
                    nxt = list(config)
                    for i, p in zip(servers, targets):
                        nxt[i] = p
                    yield tuple(nxt), sum(w[i] for i in servers)

    @lru_cache(maxsize=None)
    def best(t, config):
        if t == T:
            return 0
        r = requests[t]
        out = None
        for nxt, c in successors(config):
            if r in nxt:
                total = c + best(t + 1, nxt)
                if out is None or total < out:
                    out = total
        return out

    return best(0, tuple(initial.positions))
