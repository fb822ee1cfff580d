"""The n-sequence, harmonic numbers, and the covering set system.

For a ground set P of ``n_seq(l)`` points the construction picks a head
block M of ``ceil(n_{l-1}/2) + 1`` points, splits the rest into one block
Q_r per r in M, and emits the family ``P_r = (M - {r}) | Q_r`` for each r.
Every choice is made in input order so the result is reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .core import DomainError, PointId, RangeLimitError, VerificationError

INT64_MAX = 2**63 - 1
EXACT_HARMONIC_LIMIT = 5000


def n_seq(level: int, limit: int = INT64_MAX) -> int:
    """Ground-set size for recursion level ``level``; n_0 = 1."""
    if not isinstance(level, int) or level < 0:
        raise DomainError(f"level must be a non-negative integer, got {level!r}")
    n = 1
    for i in range(level):
        n = (-(-n // 2) + 1) * (n // 2 + 1)
        if n > limit:
            raise RangeLimitError(f"n_{i + 1} exceeds the integer limit {limit}")
    return n


def family_count(level: int) -> int:
    """Number of sets in the system over ``n_seq(level)`` points: ceil(n_{l-1}/2) + 1."""
    if level < 1:
        raise DomainError("set systems exist only for level >= 1")
    return -(-n_seq(level - 1) // 2) + 1


def harmonic(n: int, exact_limit: int = EXACT_HARMONIC_LIMIT) -> Fraction | float:
    """H(n) = 1 + 1/2 + ... + 1/n.

    Exact ``Fraction`` for ``n <= exact_limit``, compensated float sum beyond.
    """
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"harmonic number needs n >= 1, got {n!r}")
    if n <= exact_limit:
        return _harmonic_exact(n)
    return math.fsum(1.0 / i for i in range(1, n + 1))


@lru_cache(maxsize=256)
def _harmonic_exact(n: int) -> Fraction:
    # Sum over a common denominator; far cheaper than n Fraction additions.
    den = math.lcm(*range(1, n + 1))
    return Fraction(sum(den // i for i in range(1, n + 1)), den)


@dataclass(frozen=True)
class SetSystem:
    ground: tuple[PointId, ...]
    families: tuple[tuple[PointId, ...], ...]
    meta_m: tuple[PointId, ...] | None = None
    meta_partition: Mapping[PointId, tuple[PointId, ...]] | None = field(default=None, compare=False)

    @property
    def has_meta(self) -> bool:
        return self.meta_m is not None and self.meta_partition is not None


def build_set_system(points: Sequence[PointId], level: int) -> SetSystem:
    if not isinstance(level, int) or level < 1:
        raise DomainError(f"set systems need level >= 1, got {level!r}")
    points = tuple(points)
    if len(set(points)) != len(points):
        raise DomainError("ground set has repeated points")
    size = n_seq(level)
    if len(points) != size:
        raise DomainError(f"level {level} needs {size} points, got {len(points)}")
    prev = n_seq(level - 1)
    head = -(-prev // 2) + 1
    block = prev // 2
    m = points[:head]
    rest = points[head:]
    partition = {r: rest[j * block:(j + 1) * block] for j, r in enumerate(m)}
    families = tuple(tuple(x for x in m if x != r) + partition[r] for r in m)
    return SetSystem(points, families, m, partition)


@lru_cache(maxsize=4096)
def cached_set_system(points: tuple[PointId, ...], level: int) -> SetSystem:
    return build_set_system(points, level)


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    counterexample: PointId | None = None
    detail: str = ""


@dataclass(frozen=True)
class SetSystemReport:
    level: int
    checks: tuple[PropertyCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, i: int) -> PropertyCheck:
        # 1-based, matching the property numbering
        return self.checks[i - 1]


def _mask(points, index: Mapping[PointId, int]) -> int:
    m = 0
    for p in points:
        m |= 1 << index[p]
    return m


def verify_set_system(sys: SetSystem, level: int) -> SetSystemReport:
    """Exhaustively check the cardinality, avoidance and covering properties.

    Violations are reported with a witnessing point, never raised.
    """
    index = {p: i for i, p in enumerate(sys.ground)}
    prev = n_seq(level - 1) if level >= 1 else None

    # 1: count and size
    want_count = -(-prev // 2) + 1 if prev is not None else None
    problems = []
    if len(sys.families) != want_count:
        problems.append(f"{len(sys.families)} families, expected {want_count}")
    bad = [j for j, f in enumerate(sys.families) if len(set(f)) != prev or len(f) != prev]
    if bad:
        problems.append(f"families {bad} do not have size {prev}")
    stray = [x for f in sys.families for x in f if x not in index]
    if stray:
        problems.append(f"point {stray[0]} lies outside the ground set")
    p1 = PropertyCheck("cardinality", not problems, None, "; ".join(problems))

    masks = [_mask((x for x in f if x in index), index) for f in sys.families]

    # 2: each point avoided by some family
    p2 = PropertyCheck("avoidance", True)
    for p, i in index.items():
        if all(m >> i & 1 for m in masks):
            p2 = PropertyCheck("avoidance", False, p, f"every family contains {p}")
            break

    # 3: a partner q exists iff the families missing p share a point
    full = (1 << len(sys.ground)) - 1
    p3 = PropertyCheck("covering", True)
    for p, i in index.items():
        common = full
        for m in masks:
            if not m >> i & 1:
                common &= m
        if common == 0:
            p3 = PropertyCheck("covering", False, p, f"no q pairs with {p} to hit every family")
            break

    return SetSystemReport(level, (p1, p2, p3))


def _covers(sys: SetSystem, p: PointId, q: PointId) -> bool:
    return all(p in f or q in f for f in sys.families)


def property3_witness(sys: SetSystem, p: PointId) -> PointId:
    """A point q such that every family contains p or q."""
    if p not in sys.ground:
        raise DomainError(f"point {p!r} is not in the ground set")
    if sys.has_meta:
        if p in sys.meta_m:
            return next(x for x in sys.meta_m if x != p)
        for r, block in sys.meta_partition.items():
            if p in block:
                return r
        raise VerificationError(f"construction metadata does not place point {p}")
    for q in sys.ground:
        if _covers(sys, p, q):
            return q
    raise VerificationError(f"no covering partner exists for point {p}")
