"""Online algorithms for weighted k-server on a uniform metric.

An algorithm sees one request at a time and nothing else. The baselines
here are experiment fodder; none of them is claimed to be competitive.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from .core import Configuration, CostLedger, DomainError, PointId, UniformSpace, WeightVector, serve_with


class OnlineAlgorithm(ABC):
    name: str = "abstract"
    deterministic: bool = True

    def __init__(self, space: UniformSpace, weights: WeightVector, initial: Configuration, seed=None):
        if initial.space != space:
            raise DomainError("initial configuration lives in a different space")
        if initial.k != weights.k:
            raise DomainError(f"initial configuration has {initial.k} servers, weights have {weights.k}")
        if not self.deterministic and seed is None:
            raise DomainError(f"randomized algorithm {self.name!r} needs a seed")
        self.space = space
        self.weights = weights
        self.config = initial
        self.faults = 0
        self.rng = np.random.default_rng(seed) if not self.deterministic else None

    @property
    def params(self) -> str:
        return ""

    @property
    def identity(self) -> str:
        return f"{self.name}:{self.params}" if self.params else self.name

    @abstractmethod
    def choose(self, r: PointId) -> int:
        """Server to send to the uncovered point ``r``."""

    def serve_step(self, r: PointId) -> tuple[int | None, int]:
        """Serve ``r``; returns the moved server (None if already covered) and the cost."""
        self.space.check_point(r)
        if self.config.covers(r):
            return None, 0
        self.faults += 1
        i = self.choose(r)
        self.config, cost = serve_with(self.config, i, r, self.weights)
        return i, cost


class CheapestMove(OnlineAlgorithm):
    """Always moves the lightest server."""

    name = "cheapest"

    def choose(self, r):
        return 0


class WeightedRank(OnlineAlgorithm):
    """Memoryless: moves server i with probability proportional to beta**(-exponent * i)."""

    name = "weighted"
    deterministic = False

    def __init__(self, space, weights, initial, seed=None, exponent: float = 1.0):
        super().__init__(space, weights, initial, seed)
        self.exponent = float(exponent)
        p = np.array([float(weights.beta) ** (-self.exponent * i) for i in range(weights.k)])
        self.probs = p / p.sum()

    @property
    def params(self):
        return f"{self.exponent:g}"

    def choose(self, r):
        return int(self.rng.choice(self.weights.k, p=self.probs))


class StickyHeavy(OnlineAlgorithm):
    """Moves the lightest server, except that every ``period``-th fault moves the heaviest."""

    name = "sticky"

    def __init__(self, space, weights, initial, seed=None, period: int = 4):
        super().__init__(space, weights, initial, seed)
        if int(period) < 1:
            raise DomainError(f"sticky period must be >= 1, got {period!r}")
        self.period = int(period)

    @property
    def params(self):
        return str(self.period)

    def choose(self, r):
        return self.weights.k - 1 if self.faults % self.period == 0 else 0


BASELINES = {cls.name: cls for cls in (CheapestMove, WeightedRank, StickyHeavy)}


def parse_algorithm(spec: str):
    """``"name"`` or ``"name:param"`` -> (class, keyword arguments)."""
    name, _, arg = spec.partition(":")
    cls = BASELINES.get(name.strip().lower())
    if cls is None:
        raise DomainError(f"unknown algorithm {name!r}; choose from {sorted(BASELINES)}")
    kwargs = {}
    if arg:
        try:
            if cls is WeightedRank:
                kwargs["exponent"] = float(arg)
            elif cls is StickyHeavy:
                kwargs["period"] = int(arg)
            else:
                raise DomainError(f"algorithm {name!r} takes no parameters")
        except ValueError as e:
            if isinstance(e, DomainError):
                raise
            raise DomainError(f"bad parameter {arg!r} for algorithm {name!r}") from e
    return cls, kwargs


def make_algorithm(spec: str, space, weights, initial, seed=None) -> OnlineAlgorithm:
    cls, kwargs = parse_algorithm(spec)
    return cls(space, weights, initial, seed if not cls.deterministic else None, **kwargs)


def run_online(alg: OnlineAlgorithm, requests: Sequence[PointId]) -> CostLedger:
    servers = []
    for r in requests:
        i, _ = alg.serve_step(r)
        if i is not None:
            servers.append(i)
    return CostLedger.from_servers(alg.weights, servers)
