"""Domain model for weighted k-server on uniform metrics.

Servers are indexed by weight rank: server 0 is the lightest, server ``k-1``
the heaviest, and server ``i`` weighs ``beta**i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

PointId = int


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class RangeLimitError(OverflowError):
    """A value or a resource estimate exceeded a configured limit."""


class ConsistencyError(RuntimeError):
    """An internal invariant of a construction was violated."""


class VerificationError(RuntimeError):
    """An externally supplied object does not have a required property."""


@dataclass(frozen=True)
class UniformSpace:
    size: int

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 1:
            raise DomainError(f"space size must be a positive integer, got {self.size!r}")

    def __contains__(self, p) -> bool:
        return isinstance(p, int) and 0 <= p < self.size

    def points(self) -> range:
        return range(self.size)

    def distance(self, p: PointId, q: PointId) -> int:
        self.check_point(p)
        self.check_point(q)
        return 0 if p == q else 1

    def check_point(self, p) -> None:
        if p not in self:
            raise DomainError(f"point {p!r} not in space of size {self.size}")


@dataclass(frozen=True)
class WeightVector:
    k: int
    beta: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise DomainError(f"server count k must be >= 1, got {self.k!r}")
        if not isinstance(self.beta, int) or self.beta < 2:
            raise DomainError(f"beta must be an integer >= 2, got {self.beta!r}")

    def __len__(self) -> int:
        return self.k

    def __getitem__(self, i: int) -> int:
        return server_weight(self, i)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.beta**i for i in range(self.k))


def server_weight(weights: WeightVector, i: int) -> int:
    if not isinstance(i, int) or not 0 <= i < weights.k:
        raise DomainError(f"server index {i!r} out of range for k={weights.k}")
    return weights.beta**i


@dataclass(frozen=True)
class Configuration:
    """Server positions, lightest server first. Co-located servers are allowed."""

    space: UniformSpace
    positions: tuple[PointId, ...]

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(self.positions))
        if not self.positions:
            raise DomainError("a configuration needs at least one server")
        for p in self.positions:
            self.space.check_point(p)

    @classmethod
    def at(cls, space: UniformSpace, k: int, point: PointId = 0) -> Configuration:
        return cls(space, (point,) * k)

    @property
    def k(self) -> int:
        return len(self.positions)

    def covers(self, r: PointId) -> bool:
        return r in self.positions

    def server_at(self, r: PointId) -> int | None:
        """Lowest-rank server occupying ``r``, or None."""
        for i, p in enumerate(self.positions):
            if p == r:
                return i
        return None

    def moved(self, i: int, r: PointId) -> Configuration:
        pos = list(self.positions)
        pos[i] = r
        return Configuration(self.space, tuple(pos))


def serve_with(
    config: Configuration, i: int, r: PointId, weights: WeightVector
) -> tuple[Configuration, int]:
    """Move server ``i`` to ``r``; returns the new configuration and the cost paid."""
    if config.k != weights.k:
        raise DomainError(f"configuration has {config.k} servers, weights have {weights.k}")
    w = server_weight(weights, i)
    config.space.check_point(r)
    if config.positions[i] == r:
        return config, 0
    return config.moved(i, r), w


@dataclass(frozen=True)
class CostLedger:
    """Per-server move counts and the weighted total they imply."""

    weights: WeightVector
    moves: tuple[int, ...]
    total: int

    def __post_init__(self):
        if len(self.moves) != self.weights.k:
            raise DomainError("ledger needs one move count per server")
        if any(m < 0 for m in self.moves):
            raise DomainError("move counts must be non-negative")
        expected = sum(m * self.weights.beta**i for i, m in enumerate(self.moves))
        if self.total != expected:
            raise ConsistencyError(f"ledger total {self.total} != weighted moves {expected}")

    @classmethod
    def empty(cls, weights: WeightVector) -> CostLedger:
        return cls(weights, (0,) * weights.k, 0)

    @classmethod
    def from_moves(cls, weights: WeightVector, moves: Sequence[int]) -> CostLedger:
        moves = tuple(moves)
        total = sum(m * weights.beta**i for i, m in enumerate(moves))
        return cls(weights, moves, total)

    @classmethod
    def from_servers(cls, weights: WeightVector, servers: Iterable[int]) -> CostLedger:
        """Ledger for a sequence of executed (non-null) moves, given by server index."""
        counts = [0] * weights.k
        for i in servers:
            server_weight(weights, i)
            counts[i] += 1
        return cls.from_moves(weights, counts)

    def charge(self, i: int) -> CostLedger:
        counts = list(self.moves)
        counts[i] += 1
        return CostLedger(self.weights, tuple(counts), self.total + server_weight(self.weights, i))
