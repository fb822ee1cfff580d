"""Monte Carlo experiments over the adversarial input distribution."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

from .. import seeding
from ..adversary import (
    DEFAULT_MAX_REQUESTS,
    adversary_serve,
    choose_beta,
    expected_calls,
    generate_strategy,
    generate_trace,
    leaf_requests,
    preflight,
    sample_mark_order,
)
from ..algorithms import make_algorithm, parse_algorithm, run_online
from ..core import Configuration, ConsistencyError, DomainError, UniformSpace, WeightVector
from ..offline import opt_cost_dp
from ..setsys import harmonic, n_seq
from .stats import RunStats, StatsConfig, summarize, yao_gap

OPT_MODES = ("auto", "dp", "adv", "both")


@dataclass(frozen=True)
class ExperimentConfig:
    k: int
    trials: int
    seed: int
    beta: int | None = None
    epsilon: Fraction | None = None
    algorithm: str = "cheapest"
    opt_mode: str = "auto"
    alpha: Fraction | None = None
    jobs: int = 1
    max_requests: int = DEFAULT_MAX_REQUESTS
    stats: StatsConfig = StatsConfig()

    def __post_init__(self):
        if (self.beta is None) == (self.epsilon is None):
            raise DomainError("give exactly one of beta and epsilon")
        if self.epsilon is not None:
            object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.opt_mode not in OPT_MODES:
            raise DomainError(f"opt mode must be one of {OPT_MODES}")
        if self.jobs < 1:
            raise DomainError("jobs must be >= 1")
        WeightVector(self.k, self.resolved_beta)
        parse_algorithm(self.algorithm)

    @property
    def resolved_beta(self) -> int:
        return self.beta if self.beta is not None else choose_beta(self.k, self.epsilon)

    @property
    def resolved_alpha(self) -> Fraction:
        """Defaults to the lower-bound constant H(n_{k-1})."""
        return Fraction(self.alpha) if self.alpha is not None else Fraction(harmonic(n_seq(self.k - 1)))

    @property
    def resolved_opt_mode(self) -> str:
        if self.opt_mode != "auto":
            return self.opt_mode
        return "dp" if self.k <= 3 and n_seq(self.k - 1) + 1 <= 10 else "adv"

    def echo(self) -> dict:
        """Config as recorded in results files; parallelism is left out on purpose."""
        return {
            "k": self.k,
            "beta": self.resolved_beta,
            "epsilon": str(self.epsilon) if self.epsilon is not None else None,
            "trials": self.trials,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "opt_mode": self.resolved_opt_mode,
            "alpha": str(self.resolved_alpha),
            "max_requests": self.max_requests,
            "stats": self.stats.to_dict(),
        }


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    alg: int
    opt: int
    adv: int
    calls: int


def run_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    beta = cfg.resolved_beta
    seed = seeding.derive_seed(cfg.seed, seeding.TRIALS, index)
    trace = generate_trace(cfg.k, beta, seed, cfg.max_requests)
    initial = Configuration.at(trace.space, cfg.k)
    alg = make_algorithm(cfg.algorithm, trace.space, trace.weights, initial,
                         seed=seeding.derive_seed(seed, seeding.ALGORITHM))
    alg_cost = run_online(alg, trace.requests).total
    _, adv = adversary_serve(trace, initial)
    if cfg.resolved_opt_mode in ("dp", "both"):
        opt = opt_cost_dp(trace.space, trace.weights, trace.requests, initial)
        if opt > adv.total:
            raise ConsistencyError(f"trial {index}: offline optimum {opt} above adversary cost {adv.total}")
    else:
        opt = adv.total
    if alg_cost < opt:
        raise ConsistencyError(f"trial {index}: online cost {alg_cost} below offline optimum {opt}")
    return TrialRecord(index, seed, alg_cost, opt, adv.total, len(trace.calls))


def run_trials(cfg: ExperimentConfig) -> list[TrialRecord]:
    preflight(cfg.k, cfg.resolved_beta, cfg.max_requests)
    fn = partial(run_trial, cfg)
    if cfg.jobs == 1:
        return [fn(i) for i in range(cfg.trials)]
    chunk = max(1, cfg.trials // (cfg.jobs * 8))
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        records = list(pool.map(fn, range(cfg.trials), chunksize=chunk))
    return sorted(records, key=lambda r: r.trial)


def summarize_trials(cfg: ExperimentConfig, records: list[TrialRecord]) -> RunStats:
    conf = cfg.stats.confidence
    quantities = {
        name: summarize([getattr(r, name) for r in records], conf)
        for name in ("alg", "opt", "adv", "calls")
    }
    stats = RunStats(conf, quantities)
    return RunStats(conf, quantities, yao_gap(stats, cfg.resolved_alpha))


def estimate_costs(cfg: ExperimentConfig) -> RunStats:
    return summarize_trials(cfg, run_trials(cfg))


def coupon_call_stats(k: int, beta: int, trials: int, seed: int, stats: StatsConfig = StatsConfig()) -> RunStats:
    """Distribution of the number of strategy calls per adversary run.

    Uses the same per-trial streams as ``run_trial``, so the counts equal
    those of the full traces ``estimate_costs`` would generate.
    """
    WeightVector(k, beta)
    size = n_seq(k - 1) + 1
    calls = []
    for i in range(trials):
        s = seeding.derive_seed(seed, seeding.TRIALS, i)
        calls.append(len(sample_mark_order(size, seeding.stream(s, seeding.MARKS))) - 1)
    return RunStats(stats.confidence, {"calls": summarize(calls, stats.confidence)})


def coupon_expectation(k: int) -> Fraction:
    return expected_calls(k)


def conditioned_setup(level: int, beta: int, k: int | None = None):
    """Space, weights and starting configuration for one conditioned strategy call.

    The call runs on points ``0 .. n_level - 1``; one extra point parks every
    server of rank ``level`` or heavier outside the call's point set.
    """
    if level < 0:
        raise DomainError("level must be >= 0")
    k = level + 1 if k is None else k
    if k <= level:
        raise DomainError(f"need more than {level} servers to park one outside the call")
    n = n_seq(level)
    space = UniformSpace(n + 1)
    positions = tuple(i % n if i < level else n for i in range(k))
    return space, WeightVector(k, beta), Configuration(space, positions), tuple(range(n))


def conditioned_strategy_experiment(
    level: int, beta: int, algorithm: str, trials: int, seed: int,
    k: int | None = None, stats: StatsConfig = StatsConfig(),
) -> RunStats:
    space, weights, initial, pointset = conditioned_setup(level, beta, k)
    costs = []
    for t in range(trials):
        s = seeding.derive_seed(seed, seeding.CONDITIONED, t)
        node = generate_strategy(level, pointset, beta, s)
        alg = make_algorithm(algorithm, space, weights, initial, seed=seeding.derive_seed(s, seeding.ALGORITHM))
        costs.append(run_online(alg, leaf_requests([node])).total)
    return RunStats(stats.confidence, {"alg": summarize(costs, stats.confidence)})

