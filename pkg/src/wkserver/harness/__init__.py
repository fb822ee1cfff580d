from .experiments import (
    ExperimentConfig,
    conditioned_strategy_experiment,
    coupon_call_stats,
    estimate_costs,
    run_trials,
)
from .stats import RunStats, StatsConfig, yao_gap
