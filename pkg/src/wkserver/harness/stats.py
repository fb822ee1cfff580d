"""Sample summaries and confidence-interval checks (normal approximation)."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Sequence


@dataclass(frozen=True)
class StatsConfig:
    """Statistical thresholds; echoed into every results file."""

    confidence: float = 0.99

    def __post_init__(self):
        if not 0 < self.confidence < 1:
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence}")

    @property
    def z(self) -> float:
        return z_value(self.confidence)

    @classmethod
    def load(cls, path) -> StatsConfig:
        with open(path, encoding="utf-8") as fh:
            return cls(**json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)


def z_value(confidence: float) -> float:
    """Two-sided normal quantile, e.g. 2.5758 for 0.99."""
    return NormalDist().inv_cdf(0.5 + confidence / 2)


@dataclass(frozen=True)
class QuantityStats:
    count: int
    mean: float
    variance: float
    half_width: float
    minimum: float
    maximum: float

    @property
    def stddev(self) -> float:
        return math.sqrt(self.variance)

    @property
    def lower(self) -> float:
        return self.mean - self.half_width

    @property
    def upper(self) -> float:
        return self.mean + self.half_width


def summarize(values: Sequence[float], confidence: float = 0.99) -> QuantityStats:
    n = len(values)
    if n == 0:
        raise ValueError("cannot summarize an empty sample")
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1) if n > 1 else 0.0
    hw = z_value(confidence) * math.sqrt(var / n)
    return QuantityStats(n, mean, var, hw, float(min(values)), float(max(values)))


@dataclass(frozen=True)
class GapEstimate:
    alpha: float
    value: float
    half_width: float

    @property
    def lower(self) -> float:
        return self.value - self.half_width


@dataclass(frozen=True)
class RunStats:
    confidence: float
    quantities: dict[str, QuantityStats] = field(default_factory=dict)
    gap: GapEstimate | None = None

    def __getitem__(self, name: str) -> QuantityStats:
        return self.quantities[name]

    def to_dict(self) -> dict:
        out = {"confidence": self.confidence}
        out["quantities"] = {k: asdict(v) for k, v in self.quantities.items()}
        out["gap"] = asdict(self.gap) if self.gap is not None else None
        return out


def yao_gap(stats: RunStats, alpha, alg: str = "alg", opt: str = "opt") -> GapEstimate:
    """mean(alg) - alpha * mean(opt).

    The half-width adds the two intervals, which is valid however the two
    samples are correlated.
    """
    a = float(Fraction(alpha)) if not isinstance(alpha, float) else alpha
    A, O = stats[alg], stats[opt]
    return GapEstimate(a, A.mean - a * O.mean, A.half_width + abs(a) * O.half_width)


def ratio_interval(stats: RunStats, alg: str = "alg", opt: str = "opt") -> tuple[float, float]:
    """Point ratio of means and a conservative half-width from the interval endpoints."""
    A, O = stats[alg], stats[opt]
    ratio = A.mean / O.mean
    low = A.lower / O.upper if O.upper > 0 else -math.inf
    return ratio, ratio - low


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    observed: float
    target: float
    half_width: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] {self.name}: observed {self.observed:.6g} "
                f"(+/- {self.half_width:.3g}) vs target {self.target:.6g}")


def check_mean_equals(name: str, q: QuantityStats, target) -> Check:
    """Target inside the confidence interval of the mean."""
    t = float(target)
    return Check(name, abs(q.mean - t) <= q.half_width, q.mean, t, q.half_width)


def check_mean_at_least(name: str, q: QuantityStats, bound) -> Check:
    """Mean not below ``bound`` by more than the half-width."""
    b = float(bound)
    return Check(name, q.mean + q.half_width >= b, q.mean, b, q.half_width)


def check_mean_at_most(name: str, q: QuantityStats, bound) -> Check:
    b = float(bound)
    return Check(name, q.mean - q.half_width <= b, q.mean, b, q.half_width)
